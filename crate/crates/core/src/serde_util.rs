/// Serializes `+inf` as JSON `null`, and reads `null` back as `+inf`.
pub mod upper_bound {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(hi: &f64, s: S) -> Result<S::Ok, S::Error> {
        if hi.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*hi)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
