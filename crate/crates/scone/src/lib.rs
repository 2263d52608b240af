//! Constraint-aware quaternary entropy coding for DNA data storage.
//!
//! The library turns payload bitstreams into DNA strands that satisfy
//! GC-balance and homopolymer constraints by construction, and recovers the
//! payload bit-exactly from the strand. Sequence constraints live in a small
//! finite-state machine that masks the quaternary alphabet per step; an
//! arithmetic coder run in reverse (decode to write, encode to read) absorbs
//! payload bits into whatever choice freedom the mask leaves.

mod arith;
pub mod base;
pub mod coder;
pub mod container;
pub mod error;
pub mod fsm;
pub mod latent;
pub mod metrics;
pub mod model;
pub mod payload;

pub use base::{bases_from_ascii, bases_to_string, Base};
pub use coder::{
    generate_strand, generate_strand_traced, pack_strand, DnaStrand, GenerateResult, StepTrace,
};
pub use container::{
    read_fasta, read_record, write_fasta, write_record, FastaEntry, ProviderId, StrandRecord,
};
pub use error::{CodecError, Result};
pub use fsm::{BaseMask, ConfigWarning, ConstraintConfig, Fsm};
pub use latent::{
    base4_map, base4_unmap, gaussian_symbol_pmf, payload_to_symbols, payload_to_symbols_coded,
    symbols_to_payload, symbols_to_payload_coded, unzigzag, zigzag, LatentAdapterConfig,
    SymbolPmf,
};
pub use metrics::{
    corpus_eval, corpus_payload, rows_to_csv, strand_series_csv, strand_stats, CorpusEval,
    CorpusStats, StrandRow, StrandStats,
};
pub use model::{BasePmf, ProbabilityProvider, StaticProvider, UniformProvider, PMF_TOTAL};
pub use payload::Payload;
