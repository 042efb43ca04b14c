use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Å
pub const D_NC: f64 = 1.498;
/// Å
pub const D_CH: f64 = 1.067;
/// Å
pub const D_NH: f64 = 0.987;
/// degrees
pub const ANGLE_NCH: f64 = 118.36;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    /// Å
    pub xyz: [f64; 3],
}

/// Cartesian geometry, optionally with the internal angles it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub atoms: Vec<Atom>,
    /// `(α, φ)` in degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal: Option<(f64, f64)>,
}

impl GeometrySpec {
    /// `x1 y1 z1 x2 …`
    pub fn flat(&self) -> Vec<f64> {
        self.atoms.iter().flat_map(|a| a.xyz).collect()
    }

    /// Labels `C1x`, `C1y`, … matching [`GeometrySpec::flat`].
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, a) in self.atoms.iter().enumerate() {
            for ax in ["x", "y", "z"] {
                out.push(format!("{}{}{ax}", a.symbol, k + 1));
            }
        }
        out
    }
}

/// Unit vector from N toward the imine hydrogen.
///
/// C sits at the origin and N on +z. The CH₂ group lies in the xz plane with
/// its first hydrogen at +x. α is the H–N–C angle and φ the H–N–C–H dihedral
/// measured from that hydrogen, so φ → −φ reflects through the CH₂ plane.
fn nh_direction(alpha: f64, phi: f64) -> [f64; 3] {
    let (sa, ca) = alpha.to_radians().sin_cos();
    let (sp, cp) = phi.to_radians().sin_cos();
    [sa * cp, sa * sp, -ca]
}

/// Formaldimine H₂C=NH from the bending angle α and dihedral φ (degrees).
/// Atom order: C, N, H(N), H(C), H(C).
pub fn build_formaldimine(alpha: f64, phi: f64) -> GeometrySpec {
    let (s, c) = ANGLE_NCH.to_radians().sin_cos();
    let n = [0.0, 0.0, D_NC];
    let u = nh_direction(alpha, phi);
    let atom = |symbol: &str, xyz: [f64; 3]| Atom { symbol: symbol.into(), xyz };
    GeometrySpec {
        atoms: vec![
            atom("C", [0.0, 0.0, 0.0]),
            atom("N", n),
            atom("H", [D_NH * u[0], D_NH * u[1], D_NC + D_NH * u[2]]),
            atom("H", [D_CH * s, 0.0, D_CH * c]),
            atom("H", [-D_CH * s, 0.0, D_CH * c]),
        ],
        internal: Some((alpha, phi)),
    }
}

/// `∂X/∂(α, φ)` in Å/degree, `15 × 2`. Only the imine hydrogen moves.
pub fn internal_jacobian(alpha: f64, phi: f64) -> DMatrix<f64> {
    let (sa, ca) = alpha.to_radians().sin_cos();
    let (sp, cp) = phi.to_radians().sin_cos();
    let k = D_NH * std::f64::consts::PI / 180.0;
    let mut j = DMatrix::zeros(15, 2);
    j[(6, 0)] = k * ca * cp;
    j[(7, 0)] = k * ca * sp;
    j[(8, 0)] = k * sa;
    j[(6, 1)] = -k * sa * sp;
    j[(7, 1)] = k * sa * cp;
    j
}

/// Angle a–b–c in degrees.
pub fn bond_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u: [f64; 3] = std::array::from_fn(|k| a[k] - b[k]);
    let v: [f64; 3] = std::array::from_fn(|k| c[k] - b[k]);
    let dot: f64 = (0..3).map(|k| u[k] * v[k]).sum();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (nu * nv)).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Dihedral a–b–c–d in degrees, in `(−180, 180]`.
pub fn dihedral(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> f64 {
    let sub = |p: [f64; 3], q: [f64; 3]| -> [f64; 3] { std::array::from_fn(|k| p[k] - q[k]) };
    let cross = |p: [f64; 3], q: [f64; 3]| [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    let dot = |p: [f64; 3], q: [f64; 3]| p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    let (b1, b2, b3) = (sub(b, a), sub(c, b), sub(d, c));
    let n1 = cross(b1, b2);
    let n2 = cross(b2, b3);
    let m = cross(n1, b2);
    let nb2 = dot(b2, b2).sqrt();
    let y = dot(m, n2) / nb2;
    let x = dot(n1, n2);
    y.atan2(x).to_degrees()
}
