use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::output::num;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Run record written next to the output: config echo, version, wall time
/// and per-output checksums.
pub struct Manifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub threads: Option<usize>,
    pub wall_time: f64,
    pub outputs: Vec<(String, String)>,
}

impl Manifest {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("tool".into(), "spinglass".into());
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        m.insert("command".into(), self.command.clone().into());
        m.insert("argv".into(), self.argv.clone().into());
        m.insert("config".into(), self.config.clone());
        m.insert("seed".into(), self.seed.into());
        m.insert("threads".into(), self.threads.map(Value::from).unwrap_or(Value::Null));
        m.insert("parallel".into(), cfg!(feature = "parallel").into());
        m.insert("wall_time_seconds".into(), num(self.wall_time));
        let outs: Vec<Value> = self
            .outputs
            .iter()
            .map(|(path, sum)| {
                let mut o = Map::new();
                o.insert("path".into(), path.clone().into());
                o.insert("sha256".into(), sum.clone().into());
                Value::Object(o)
            })
            .collect();
        m.insert("outputs".into(), outs.into());
        Value::Object(m)
    }
}
