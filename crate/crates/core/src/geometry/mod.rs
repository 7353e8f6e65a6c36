//! Array geometry, first-order encoding, loudspeaker grids, VBAP and HRIRs.

pub mod array;
pub mod foa;
pub mod grid;
pub mod hrir;
pub mod vbap;

pub use array::{builtin_array, MicArrayGeometry, SPEED_OF_SOUND};
pub use foa::{encode_foa_open_array, FoaConvention, FoaSignal};
pub use grid::{az_el_directions, az_el_grid, fibonacci_grid, nearest_direction, LoudspeakerGrid};
pub use hrir::{
    reference_hrir_set, spherical_head_hrir, spherical_head_set, HrirSet, DEFAULT_HRIR_LENGTH, HEAD_RADIUS,
    REFERENCE_GRID_STEP_DEG,
};
pub use vbap::{vbap_gains, VbapGains};
