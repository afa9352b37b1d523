//! Fixtures shared by the criterion benches.

use layerkit::{MeshFamily, MeshSpec, Psi};

/// One spec per mesh family at the given eps and N.
pub fn family_specs(eps: f64, n: usize) -> Vec<MeshSpec> {
    MeshFamily::ALL
        .into_iter()
        .map(|family| MeshSpec::new(family, eps, n))
        .chain(std::iter::once(MeshSpec { psi: Psi::BakhvalovShishkin, ..MeshSpec::new(MeshFamily::SType, eps, n) }))
        .collect()
}
