use std::io::Read;

use clap::ValueEnum;

use unext::quantum::{ChannelDescriptor, ChannelKind};

use crate::{ChannelArgs, Failure};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Identity,
    Erasure,
    Depolarizing,
    SemicausalErasure,
    FlaggedErasure,
}

impl From<KindArg> for ChannelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Identity => ChannelKind::Identity,
            KindArg::Erasure => ChannelKind::Erasure,
            KindArg::Depolarizing => ChannelKind::Depolarizing,
            KindArg::SemicausalErasure => ChannelKind::SemicausalErasure,
            KindArg::FlaggedErasure => ChannelKind::FlaggedErasure,
        }
    }
}

/// Reads inline JSON, a file, or stdin for `-`.
pub fn read_text(src: &str) -> Result<String, Failure> {
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(src).map_err(|e| Failure::invalid(format!("cannot read {src}: {e}")))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::invalid(format!("cannot parse {what}: {e}")))
}

/// Descriptor from `--channel`, or assembled from `--kind`, `--d`, `--p`, `--q`.
pub fn descriptor(args: &ChannelArgs) -> Result<ChannelDescriptor, Failure> {
    if let Some(src) = &args.channel {
        let mut desc: ChannelDescriptor = parse_json(&read_text(src)?, "channel descriptor")?;
        desc.d = args.d.or(desc.d);
        desc.p = args.p.or(desc.p);
        desc.q = args.q.or(desc.q);
        return Ok(desc);
    }
    let kind = args.kind.ok_or_else(|| Failure::invalid("give --channel or --kind"))?;
    Ok(ChannelDescriptor { kind: kind.into(), d: args.d, p: args.p, q: args.q, choi: None })
}
