//! JSON helpers that keep big integers as JSON numbers.

use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::Int;

pub fn int_number(n: &Int) -> serde_json::Number {
    n.to_string()
        .parse()
        .expect("decimal integers are valid JSON numbers")
}

pub fn int_value(n: &Int) -> serde_json::Value {
    serde_json::Value::Number(int_number(n))
}

pub fn serialize_ints<S: Serializer>(v: &[Int], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&int_number(x))?;
    }
    seq.end()
}

pub fn serialize_int<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&int_number(v), s)
}
