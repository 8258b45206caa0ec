//! Phonetic, logographic and random-cluster encodings of translation
//! corpora, with subword segmentation, embedding-space geometry,
//! robustness augmentation and BLEU scoring.
//!
//! The guide in `book/` walks through each module.

pub mod augment;
pub mod clustering;
pub mod codecs;
pub mod corpus;
pub mod evaluate;
pub mod geometry;
pub mod pipeline;
pub mod rng;
pub mod subword;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/codecs.md")]
    mod codecs {}
    #[doc = include_str!("../../../book/src/clustering.md")]
    mod clustering {}
    #[doc = include_str!("../../../book/src/subword.md")]
    mod subword {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/augment.md")]
    mod augment {}
    #[doc = include_str!("../../../book/src/evaluate.md")]
    mod evaluate {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
}
