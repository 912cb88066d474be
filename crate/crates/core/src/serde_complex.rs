//! Complex numbers serialise as `[re, im]`.

use nalgebra::Complex;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub fn serialize<S: Serializer>(z: &Complex<f64>, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&z.re)?;
    seq.serialize_element(&z.im)?;
    seq.end()
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[Complex<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(zs.len()))?;
        for z in zs {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}
