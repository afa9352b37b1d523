use super::Mesh1D;

/// Reflects a mesh through `x = 1/2`, moving a layer at 0 to 1.
pub fn mirror_mesh(mesh: &Mesh1D) -> Mesh1D {
    let nodes: Vec<f64> = mesh.nodes().iter().rev().map(|x| 1.0 - x).collect();
    Mesh1D::pinned(nodes).expect("reflection preserves mesh validity")
}

/// Places a half-size copy of `mesh` on `[0, 1/2]` and its reflection on
/// `[1/2, 1]`. The result has twice the cells and is symmetric about 1/2.
pub fn compose_both(mesh: &Mesh1D) -> Mesh1D {
    let left: Vec<f64> = mesh.nodes().iter().map(|x| 0.5 * x).collect();
    let mut nodes = left.clone();
    nodes.extend(left.iter().rev().skip(1).map(|x| 1.0 - x));
    Mesh1D::pinned(nodes).expect("composition preserves mesh validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, shishkin, LayerSide, MeshFamily, MeshSpec};

    #[test]
    fn uniform_is_fixed() {
        let u = Mesh1D::uniform(8).unwrap();
        assert_eq!(mirror_mesh(&u), u);
    }

    #[test]
    fn mirror_is_an_involution() {
        // 1 - (1 - x) is exact for x >= 1/2 and within half an ulp of 1 below
        let m = shishkin(1e-4, 1.0, 2.0, 16).unwrap();
        let back = mirror_mesh(&mirror_mesh(&m));
        for (a, b) in back.nodes().iter().zip(m.nodes()) {
            if *b >= 0.5 {
                assert_eq!(a, b);
            } else {
                assert!((a - b).abs() <= f64::EPSILON / 2.0);
            }
        }
        let u = Mesh1D::uniform(8).unwrap();
        assert_eq!(mirror_mesh(&mirror_mesh(&u)), u);
    }

    #[test]
    fn both_sided_shishkin_is_symmetric() {
        let spec = MeshSpec { layer_side: LayerSide::Both, ..MeshSpec::new(MeshFamily::Shishkin, 1e-4, 8) };
        let m = generate(&spec).unwrap().mesh;
        assert_eq!(m.cells(), 8);
        let x = m.nodes();
        for i in 0..=8 {
            assert!((x[i] + x[8 - i] - 1.0).abs() <= 2.0 * f64::EPSILON, "i={i}");
        }
        assert!(x[1] < 1e-3 && 1.0 - x[7] < 1e-3);
    }
}
