use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{MatcherModel, ModelKind, ModelSpec};
use super::train::{EpochLog, TrainConfig};
use crate::binio;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"KGMMODEL";
const VERSION: u32 = 1;

/// Training provenance stored next to the parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub direction: String,
    pub train_config: Option<TrainConfig>,
    pub best_epoch: usize,
    pub log: Vec<EpochLog>,
}

/// A model plus metadata. The binary form stores parameters as raw IEEE
/// bits and round-trips exactly; the JSON form is for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: MatcherModel,
    pub meta: CheckpointMeta,
}

#[derive(Serialize, Deserialize)]
struct JsonCheckpoint {
    kind: ModelKind,
    input_dim: usize,
    hidden: usize,
    params: Vec<f64>,
    meta: CheckpointMeta,
}

impl Checkpoint {
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        let m = &self.model;
        binio::write_header(w, MAGIC, VERSION)?;
        binio::write_u8(w, m.kind().tag())?;
        binio::write_u64(w, m.input_dim() as u64)?;
        binio::write_u64(w, m.hidden() as u64)?;
        binio::write_u64(w, m.params().len() as u64)?;
        for &p in m.params() {
            binio::write_f64(w, p)?;
        }
        let meta = serde_json::to_string(&self.meta).expect("metadata serializes");
        binio::write_str(w, &meta)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let bad = |m: String| Error::format("model checkpoint", m);
        binio::read_header(r, MAGIC, VERSION).map_err(|e| bad(e.to_string()))?;
        let tag = binio::read_u8(r)?;
        let kind = ModelKind::from_tag(tag).ok_or_else(|| bad(format!("unknown model kind tag {tag}")))?;
        let input_dim = binio::read_u64(r)? as usize;
        let hidden = binio::read_u64(r)? as usize;
        let count = binio::read_u64(r)?;
        if count > (1 << 32) {
            return Err(bad(format!("implausible parameter count {count}")));
        }
        let params = (0..count).map(|_| binio::read_f64(r)).collect::<std::io::Result<Vec<f64>>>()?;
        let meta = serde_json::from_str(&binio::read_str(r)?).map_err(|e| bad(e.to_string()))?;
        let model = MatcherModel::from_params(ModelSpec { kind, hidden }, input_dim, params)?;
        Ok(Checkpoint { model, meta })
    }

    pub fn to_json(&self) -> String {
        let m = &self.model;
        serde_json::to_string_pretty(&JsonCheckpoint {
            kind: m.kind(),
            input_dim: m.input_dim(),
            hidden: m.hidden(),
            params: m.params().to_vec(),
            meta: self.meta.clone(),
        })
        .expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: JsonCheckpoint = serde_json::from_str(s).map_err(|e| Error::format("model checkpoint", e.to_string()))?;
        let model = MatcherModel::from_params(ModelSpec { kind: j.kind, hidden: j.hidden }, j.input_dim, j.params)?;
        Ok(Checkpoint { model, meta: j.meta })
    }

    /// Binary unless the extension is `.json`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        if is_json(path) {
            w.write_all(self.to_json().as_bytes()).map_err(|e| Error::io(path, e))?;
        } else {
            self.write_binary(&mut w)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(f);
        if is_json(path) {
            let mut s = String::new();
            r.read_to_string(&mut s).map_err(|e| Error::io(path, e))?;
            Self::from_json(&s)
        } else {
            Self::read_binary(&mut r).map_err(|e| match e {
                Error::Format { message, .. } => Error::format(path.display().to_string(), message),
                other => other,
            })
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let model = MatcherModel::xavier(ModelSpec::mlp(3), 6, 42).unwrap();
        let meta = CheckpointMeta {
            direction: "A->B".into(),
            train_config: Some(TrainConfig::default()),
            best_epoch: 2,
            log: vec![EpochLog { epoch: 1, mean_nll: 0.1 + 0.2, valid_mrr: Some(1.0 / 3.0) }],
        };
        Checkpoint { model, meta }
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let c = sample();
        let mut buf = Vec::new();
        c.write_binary(&mut buf).unwrap();
        let back = Checkpoint::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back, c);
        let bits = |m: &MatcherModel| m.params().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.model), bits(&c.model));
    }

    #[test]
    fn json_round_trip() {
        let c = sample();
        assert_eq!(Checkpoint::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_corruption() {
        let mut buf = Vec::new();
        sample().write_binary(&mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(Checkpoint::read_binary(&mut bad.as_slice()).is_err());
        let mut bad = buf.clone();
        bad[12] = 9;
        assert!(Checkpoint::read_binary(&mut bad.as_slice()).is_err());
        assert!(Checkpoint::read_binary(&mut &buf[..buf.len() - 3]).is_err());
    }

    #[test]
    fn file_forms() {
        let dir = tempfile::tempdir().unwrap();
        let c = sample();
        for name in ["m.bin", "m.json"] {
            let p = dir.path().join(name);
            c.save(&p).unwrap();
            assert_eq!(Checkpoint::load(&p).unwrap(), c);
        }
        assert!(Checkpoint::load(&dir.path().join("missing.bin")).is_err());
    }
}
