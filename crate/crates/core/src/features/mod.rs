//! Fixed-layout sparse ADU vectors: lexical markers, punctuation and POS
//! n-grams for the ADU and its reading-order neighbours.

mod extract;
mod layout;

pub use extract::{
    adu_block, adu_key, context_vector, featurize_corpus, featurize_document, lexical_features, morpho_features,
    punct_features, read_feature_file, write_feature_file, Analyses, FeatureError, FeatureVector, SparseCounts,
};
pub use layout::{
    ngram_slot, verb_slots, ContextBlock, FeatureLayout, FeatureSet, MORPHO_DIM, NGRAM_DIM, NGRAM_ORDERS, PUNCT_DIM,
    PUNCT_MARKS, VERB_DIM,
};
