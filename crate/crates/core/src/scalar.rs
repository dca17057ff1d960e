//! Scalar helpers. Complex scalars are used throughout; real spaces simply
//! keep every imaginary part at zero.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type C64 = num_complex::Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Unit-modulus phase of `z`, or `1` for `z = 0`.
pub fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ONE
    } else {
        z / r
    }
}

/// `m`-th roots of unity `e^{2πik/m}`, with the quarter turns snapped to
/// exact values so grids that contain `±1, ±i` reproduce them bit-exactly.
pub fn phase_grid(m: usize) -> Vec<C64> {
    (0..m)
        .map(|k| {
            if 4 * k % m == 0 {
                match 4 * k / m {
                    0 => C64::new(1.0, 0.0),
                    1 => C64::new(0.0, 1.0),
                    2 => C64::new(-1.0, 0.0),
                    _ => C64::new(0.0, -1.0),
                }
            } else {
                let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                C64::new(t.cos(), t.sin())
            }
        })
        .collect()
}

/// Lexicographic comparison on `(re, im)` coordinates.
pub fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

pub fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

/// JSON form of a scalar: a bare number for real values, `[re, im]` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonScalar(pub C64);

impl Serialize for JsonScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re + 0.0)
        } else {
            [self.0.re + 0.0, self.0.im + 0.0].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for JsonScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Real(x) => JsonScalar(C64::new(x, 0.0)),
            Raw::Pair([re, im]) => JsonScalar(C64::new(re, im)),
        })
    }
}

/// Complex-aware JSON form: always `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonComplex(pub C64);

impl Serialize for JsonComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re + 0.0, self.0.im + 0.0].serialize(s)
    }
}

/// Serializes a coordinate list, choosing the real or `[re, im]` form.
/// Adding `0.0` maps `-0.0` to `0.0`.
pub fn coords_to_json(coords: &[C64], complex: bool) -> serde_json::Value {
    if complex {
        serde_json::to_value(coords.iter().map(|&z| JsonComplex(z)).collect::<Vec<_>>())
    } else {
        serde_json::to_value(coords.iter().map(|z| z.re + 0.0).collect::<Vec<_>>())
    }
    .expect("finite coordinates serialize")
}

pub fn coords_from_json(v: &serde_json::Value) -> Result<Vec<C64>, serde_json::Error> {
    let raw: Vec<JsonScalar> = serde_json::from_value(v.clone())?;
    Ok(raw.into_iter().map(|s| s.0).collect())
}
