pub mod ccv;
pub mod format;
pub mod hangul;
pub mod lattice;
pub mod lexicon;
pub mod normalize;
pub mod phrasebreak;
pub mod pipeline;
