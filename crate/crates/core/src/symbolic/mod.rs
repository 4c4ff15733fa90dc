//! Finite word combinatorics over the alphabet `{1,..,N}` and
//! shift-invariant measure descriptions with exact cylinder evaluation.

mod measure;
mod word;

pub use measure::{
    cylinder_measure, entropy_rate, invariance_check, sample_word, BernoulliSpec, EntropyEstimate,
    EntropyMethod, InvarianceReport, MarkovSpec, MeasureSpec, PerronGibbsSpec,
};
pub use word::{enumerate_words, word_count, word_product, word_product_exact, Word, WordIter};

/// Hard cap on the number of words an exhaustive enumeration may touch.
pub const DEFAULT_WORD_BUDGET: u64 = 1 << 24;
