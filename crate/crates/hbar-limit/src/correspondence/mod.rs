//! Maps between the two sides: Husimi symbols (quantum to classical), anti-Wick
//! quantization (classical to quantum), their composites, moduli of continuity,
//! Wigner functions and characteristic functions of states.

mod grid;
mod maps;
mod modulus;
mod states;

pub use grid::QuadratureGrid;
pub use maps::{
    antiwick_closed_form, antiwick_from_values, antiwick_quantize, berezin_transform, coherent_matrix,
    compare, husimi_at, husimi_symbol, husimi_values, identity_resolution_defect, thermal_operator,
};
pub use modulus::{
    equicontinuity_scan, estim_bound, modulus_profile, quantum_modulus, EquicontinuityTable, ModulusProfile,
};
pub use states::{
    characteristic_function, displaced_parity, wigner_function, wigner_inverse_quantize, wigner_overlap_check,
    CharacteristicTable,
};
