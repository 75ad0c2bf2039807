//! Deterministic pseudo-word pools for review text.
//!
//! Three sentiment pools of 200 words each plus a 2000-word shared noise
//! vocabulary, all distinct, all lowercase ASCII letters so the tokenizer
//! passes them through unchanged.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::rng::{stream, Prng, TAG_WORDS};

pub const POOL_SIZE: usize = 200;
pub const NOISE_VOCAB_SIZE: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sentiment {
    Negative,
    Neutral,
    Positive,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive];

    pub fn index(self) -> usize {
        match self {
            Sentiment::Negative => 0,
            Sentiment::Neutral => 1,
            Sentiment::Positive => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
            Sentiment::Positive => "positive",
        }
    }
}

/// Rating-to-sentiment rule shared by the generator and the Q28 pipeline:
/// 1-2 negative, 3 neutral, 4-5 positive.
pub fn sentiment_of_rating(rating: u8) -> Sentiment {
    match rating {
        0..=2 => Sentiment::Negative,
        3 => Sentiment::Neutral,
        _ => Sentiment::Positive,
    }
}

#[derive(Debug, Clone)]
pub struct WordPools {
    /// Indexed by Sentiment::index().
    pub sentiment: [Vec<String>; 3],
    pub noise: Vec<String>,
}

impl WordPools {
    pub fn pool(&self, s: Sentiment) -> &[String] {
        &self.sentiment[s.index()]
    }
}

/// Builds the pools for a generator seed. Pure function of the seed.
pub fn word_pools(seed: u64) -> WordPools {
    let mut rng = stream(seed, TAG_WORDS);
    let total = 3 * POOL_SIZE + NOISE_VOCAB_SIZE;
    let mut seen: HashSet<String> = HashSet::with_capacity(total);
    let mut words: Vec<String> = Vec::with_capacity(total);
    while words.len() < total {
        let w = make_word(&mut rng);
        if seen.insert(w.clone()) {
            words.push(w);
        }
    }
    let negative = words[..POOL_SIZE].to_vec();
    let neutral = words[POOL_SIZE..2 * POOL_SIZE].to_vec();
    let positive = words[2 * POOL_SIZE..3 * POOL_SIZE].to_vec();
    let noise = words[3 * POOL_SIZE..].to_vec();
    WordPools {
        sentiment: [negative, neutral, positive],
        noise,
    }
}

const CONSONANTS: &[u8] = b"bcdfghklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// A pronounceable 2-4 syllable consonant-vowel word.
pub(crate) fn make_word(rng: &mut Prng) -> String {
    let syllables = rng.gen_range(2..=4);
    let mut word = String::with_capacity(syllables * 2);
    for _ in 0..syllables {
        word.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())] as char);
        word.push(VOWELS[rng.gen_range(0..VOWELS.len())] as char);
    }
    word
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_are_disjoint_and_sized() {
        let pools = word_pools(42);
        let mut all: Vec<&String> = pools.sentiment.iter().flatten().collect();
        all.extend(&pools.noise);
        assert_eq!(all.len(), 3 * POOL_SIZE + NOISE_VOCAB_SIZE);
        let unique: HashSet<&String> = all.iter().copied().collect();
        assert_eq!(unique.len(), all.len());
        for word in all {
            assert!(word.chars().all(|c| c.is_ascii_lowercase()));
        }
    }

    #[test]
    fn pools_are_a_pure_function_of_the_seed() {
        assert_eq!(word_pools(7).noise, word_pools(7).noise);
        assert_ne!(word_pools(7).noise, word_pools(8).noise);
    }

    #[test]
    fn rating_rule_matches_the_committed_mapping() {
        assert_eq!(sentiment_of_rating(1), Sentiment::Negative);
        assert_eq!(sentiment_of_rating(2), Sentiment::Negative);
        assert_eq!(sentiment_of_rating(3), Sentiment::Neutral);
        assert_eq!(sentiment_of_rating(4), Sentiment::Positive);
        assert_eq!(sentiment_of_rating(5), Sentiment::Positive);
    }
}
