//! JSON interchange for channels, states and ensembles.
//!
//! Complex entries are `[re, im]` pairs and matrices are flattened row-major:
//!
//! ```json
//! { "d_in": 2, "d_out": 2, "kraus": [[[1,0],[0,0],[0,0],[1,0]]] }
//! { "d_in": 1, "d_out": 2, "choi": [[1,0],[0,0],[0,0],[0,0]] }
//! { "dims": [2], "matrix": [[0.5,0],[0,0],[0,0],[0.5,0]] }
//! { "dims": [2], "vector": [[1,0],[0,0]] }
//! { "items": [ { "p": 0.5, "state": { ... } }, ... ] }
//! ```

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channels::{ChoiMatrix, QuantumChannel};
use crate::entropic::Ensemble;
use crate::linalg::{ComplexMatrix, DensityMatrix, PureState};
use crate::{Error, Result, C64};

type Pair = [f64; 2];

fn to_pairs(v: &[C64]) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[Pair]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    d_in: usize,
    d_out: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kraus: Option<Vec<Vec<Pair>>>,
    /// Choi matrix on `in ⊗ out`, as an alternative to `kraus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    choi: Option<Vec<Pair>>,
}

impl ChannelJson {
    fn build(self, tol_psd: f64, tol_tp: f64) -> Result<QuantumChannel> {
        match (self.kraus, self.choi) {
            (Some(kraus), None) => {
                let kraus = kraus
                    .iter()
                    .map(|k| ComplexMatrix::new(self.d_out, self.d_in, from_pairs(k)))
                    .collect::<Result<Vec<_>>>()?;
                QuantumChannel::with_tolerance(self.d_in, self.d_out, kraus, tol_tp)
            }
            (None, Some(choi)) => {
                let d = self.d_in * self.d_out;
                let m = ComplexMatrix::new(d, d, from_pairs(&choi))?;
                if !m.is_hermitian(crate::tol::HERM) {
                    return Err(Error::arg("Choi matrix is not Hermitian"));
                }
                ChoiMatrix::new(m, self.d_in, self.d_out)?.to_channel_with(tol_psd, tol_tp)
            }
            _ => Err(Error::Parse(
                "channel JSON needs exactly one of \"kraus\" or \"choi\"".into(),
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    dims: Vec<usize>,
    matrix: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureJson {
    dims: Vec<usize>,
    vector: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemJson {
    p: f64,
    state: DensityMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleJson {
    items: Vec<ItemJson>,
}

impl Serialize for QuantumChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson {
            d_in: self.d_in(),
            d_out: self.d_out(),
            kraus: Some(self.kraus().iter().map(|k| to_pairs(k.as_slice())).collect()),
            choi: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumChannel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ChannelJson::deserialize(d)?
            .build(crate::tol::PSD, crate::tol::TP)
            .map_err(D::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson {
            dims: self.dims().to_vec(),
            matrix: to_pairs(self.matrix().as_slice()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = StateJson::deserialize(d)?;
        let n: usize = j.dims.iter().product();
        let m = ComplexMatrix::new(n, n, from_pairs(&j.matrix)).map_err(D::Error::custom)?;
        DensityMatrix::new(m, j.dims).map_err(D::Error::custom)
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PureJson {
            dims: self.dims().to_vec(),
            vector: to_pairs(self.vector()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PureJson::deserialize(d)?;
        PureState::new(from_pairs(&j.vector), j.dims).map_err(D::Error::custom)
    }
}

impl Serialize for Ensemble {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnsembleJson {
            items: self
                .items()
                .iter()
                .map(|(p, st)| ItemJson {
                    p: *p,
                    state: st.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = EnsembleJson::deserialize(d)?;
        Ensemble::new(j.items.into_iter().map(|i| (i.p, i.state)).collect())
            .map_err(D::Error::custom)
    }
}

/// Input accepted wherever a state is expected: a density matrix or a pure
/// state vector.
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("vector").is_some() {
        let psi: PureState =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(psi.to_density())
    } else {
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Parses channel JSON, keeping CP/TP and shape errors distinct from
/// syntax errors.
pub fn parse_channel(text: &str) -> Result<QuantumChannel> {
    parse_channel_with(text, crate::tol::PSD, crate::tol::TP)
}

/// [`parse_channel`] with explicit CP and TP tolerances.
pub fn parse_channel_with(text: &str, tol_psd: f64, tol_tp: f64) -> Result<QuantumChannel> {
    let j: ChannelJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    j.build(tol_psd, tol_tp)
}

pub fn parse_ensemble(text: &str) -> Result<Ensemble> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
