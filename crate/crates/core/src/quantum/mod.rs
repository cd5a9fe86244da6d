//! Channels and superchannels in the Choi picture.

mod bipartite;
mod channel;
mod descriptor;
mod superchannel;

pub use bipartite::{
    alice_to_bob_identity, as_bipartite, make_flagged_erasure, make_semicausal_erasure, BipartiteChannel, ALICE_IN,
    ALICE_OUT, BOB_IN, BOB_OUT,
};
pub use channel::{
    apply_channel, choi_from_kraus, depolarizing_fidelity, isotropic_state, make_depolarizing, make_erasure,
    make_identity, make_replacer, max_entangled, ChoiChannel, DEFAULT_TRACE_TOL,
};
pub use descriptor::{AnyChannel, ChannelDescriptor, ChannelKind, ChoiBlock};
pub use superchannel::{
    superchannel_apply, superchannel_residuals, validate_superchannel, SuperchannelChoi, SuperchannelReport,
    SUPERCHANNEL_TOL,
};
