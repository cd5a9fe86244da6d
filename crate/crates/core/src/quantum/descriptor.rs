use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape, C64};

use super::bipartite::{make_flagged_erasure, make_semicausal_erasure, BipartiteChannel};
use super::channel::{make_depolarizing, make_erasure, make_identity, ChoiChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Erasure,
    Depolarizing,
    Identity,
    SemicausalErasure,
    FlaggedErasure,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiBlock {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
    pub inputs: Vec<String>,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

/// JSON description of a channel, as read by the command-line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDescriptor {
    pub kind: ChannelKind,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub choi: Option<ChoiBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyChannel {
    PointToPoint(ChoiChannel),
    Bipartite(BipartiteChannel),
}

impl ChannelDescriptor {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    fn need_d(&self) -> Result<usize> {
        self.d.ok_or_else(|| Error::Descriptor("missing field d".into()))
    }

    fn need_p(&self) -> Result<f64> {
        self.p.ok_or_else(|| Error::Descriptor("missing field p".into()))
    }

    pub fn build(&self) -> Result<AnyChannel> {
        Ok(match self.kind {
            ChannelKind::Identity => AnyChannel::PointToPoint(make_identity(self.need_d()?)?),
            ChannelKind::Erasure => AnyChannel::PointToPoint(make_erasure(self.need_d()?, self.need_p()?)?),
            ChannelKind::Depolarizing => AnyChannel::PointToPoint(make_depolarizing(self.need_d()?, self.need_p()?)?),
            ChannelKind::SemicausalErasure => {
                AnyChannel::Bipartite(make_semicausal_erasure(self.need_d()?, self.need_p()?)?)
            }
            ChannelKind::FlaggedErasure => {
                let q = self.q.ok_or_else(|| Error::Descriptor("missing field q".into()))?;
                AnyChannel::Bipartite(make_flagged_erasure(self.need_d()?, self.need_p()?, q)?)
            }
            ChannelKind::Custom => {
                let block = self.choi.as_ref().ok_or_else(|| Error::Descriptor("custom kind needs a choi block".into()))?;
                AnyChannel::PointToPoint(block.build()?)
            }
        })
    }
}

impl ChoiBlock {
    pub fn build(&self) -> Result<ChoiChannel> {
        let shape = SubsystemShape::new(self.dims.clone(), self.labels.clone())?;
        let n = shape.total_dim();
        let rows_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !rows_ok(&self.re) || !self.im.as_ref().is_none_or(rows_ok) {
            return Err(Error::Descriptor(format!("choi entries must be {n}x{n}")));
        }
        let m = CMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        });
        let outputs: Vec<String> = self.labels.iter().filter(|l| !self.inputs.contains(l)).cloned().collect();
        let op = LabeledOperator::new(HermitianMatrix::with_tol(m, 1e-8)?, shape)?;
        ChoiChannel::new(op, &self.inputs, &outputs)
    }

    pub fn from_channel(ch: &ChoiChannel) -> Self {
        let m = ch.choi().matrix();
        let n = m.nrows();
        Self {
            dims: ch.shape().dims().to_vec(),
            labels: ch.shape().labels().to_vec(),
            inputs: ch.inputs().to_vec(),
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: Some((0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect()),
        }
    }
}
