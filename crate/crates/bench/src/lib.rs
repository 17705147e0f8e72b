//! Shared inputs for the criterion benchmarks.

use ricci4_core::{FamilyId, FourierField, GeometryState, DEFAULT_WARP_N};

/// One representative state per catalog family.
pub fn representative_states() -> Vec<GeometryState> {
    let mut out: Vec<GeometryState> = FamilyId::ALL
        .into_iter()
        .filter(|f| *f != FamilyId::WarpedS1xS3)
        .map(|f| GeometryState::homogeneous(f, f.entry().default_params()).expect("defaults are valid"))
        .collect();
    out.push(warped(DEFAULT_WARP_N));
    out
}

/// `φ = 1`, `ψ = 4 + 0.2 cos θ` on `n` grid points.
pub fn warped(n: usize) -> GeometryState {
    let psi = FourierField {
        mean: 4.0,
        cos: vec![0.2],
        sin: vec![],
    };
    GeometryState::warped_from_fourier(&FourierField::constant(1.0), &psi, n).expect("valid warp")
}
