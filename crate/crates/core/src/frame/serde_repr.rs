//! JSON shape `{"dim": d, "vectors": [[re, im], ...]}`, entries listed
//! column-major (all components of `f_1`, then `f_2`, ...).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::FiniteFrame;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameRepr {
    dim: usize,
    vectors: Vec<[f64; 2]>,
}

impl Serialize for FiniteFrame {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FrameRepr {
            dim: self.dim(),
            vectors: self.synthesis.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteFrame {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FrameRepr::deserialize(deserializer)?;
        if repr.dim == 0 || repr.vectors.is_empty() || repr.vectors.len() % repr.dim != 0 {
            return Err(de::Error::custom(format!(
                "{} entries do not form vectors of dimension {}",
                repr.vectors.len(),
                repr.dim
            )));
        }
        let k = repr.vectors.len() / repr.dim;
        let m = DMatrix::from_iterator(
            repr.dim,
            k,
            repr.vectors.iter().map(|[re, im]| Complex64::new(*re, *im)),
        );
        FiniteFrame::from_synthesis(m).map_err(de::Error::custom)
    }
}
