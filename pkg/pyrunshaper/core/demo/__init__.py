from pyrunshaper.core.demo.track import (
    BUNDLED_DEMOS,
    DemoFrame,
    DemoTrack,
    load_demo,
    load_normalized,
    normalize,
    phase_lookup,
    resolve_demo,
    save_demo,
)

__all__ = [
    'BUNDLED_DEMOS',
    'DemoFrame',
    'DemoTrack',
    'load_demo',
    'load_normalized',
    'normalize',
    'phase_lookup',
    'resolve_demo',
    'save_demo',
]
