//! Reading and writing embedding files, centering, synthetic generation and
//! checks of the i.i.d. entry assumption on real data.

mod diagnostics;
mod io;
mod transform;

pub use diagnostics::{diagnostics, DiagnosticsReport, ALL_PAIRS_MAX_DIM, DEFAULT_CORRELATION_SAMPLE};
pub use io::{
    load_embeddings, load_embeddings_with, write_embeddings, CsvOptions, EmbeddingFileHeader,
    EmbeddingFormat, EMB1_HEADER_LEN, EMB1_MAGIC, EMB1_VERSION,
};
pub use transform::{center, column_means, synth};
