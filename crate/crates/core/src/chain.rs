use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A subset of the edges of a decoding graph, stored as a dense bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ErrorChain {
    words: Vec<u64>,
    len: usize,
}

impl ErrorChain {
    pub fn empty(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_edges<I: IntoIterator<Item = usize>>(len: usize, edges: I) -> Self {
        let mut chain = Self::empty(len);
        for e in edges {
            chain.toggle(e);
        }
        chain
    }

    /// Number of edges in the underlying graph (not the chain weight).
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        debug_assert!(e < self.len);
        self.words[e >> 6] >> (e & 63) & 1 == 1
    }

    /// Flips membership of `e` and returns whether it is now present.
    #[inline]
    pub fn toggle(&mut self, e: usize) -> bool {
        assert!(e < self.len, "edge {e} out of range {}", self.len);
        self.words[e >> 6] ^= 1 << (e & 63);
        self.contains(e)
    }

    pub fn insert(&mut self, e: usize) {
        if !self.contains(e) {
            self.toggle(e);
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }

    pub fn xor_assign(&mut self, other: &ErrorChain) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &ErrorChain) -> ErrorChain {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Size of the intersection with `other`.
    pub fn overlap(&self, other: &ErrorChain) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for ErrorChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ErrorChain{:?}", self.to_vec())
    }
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    len: usize,
    edges: Vec<usize>,
}

impl Serialize for ErrorChain {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ChainRepr {
            len: self.len,
            edges: self.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ErrorChain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ChainRepr::deserialize(d)?;
        if let Some(&e) = repr.edges.iter().find(|&&e| e >= repr.len) {
            return Err(serde::de::Error::custom(format!("edge {e} out of range")));
        }
        Ok(ErrorChain::from_edges(repr.len, repr.edges))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toggle_and_iterate() {
        let mut c = ErrorChain::empty(130);
        c.toggle(0);
        c.toggle(64);
        c.toggle(129);
        c.toggle(64);
        assert_eq!(c.to_vec(), vec![0, 129]);
        assert_eq!(c.count(), 2);
        let d = ErrorChain::from_edges(130, [129, 5]);
        assert_eq!(c.xor(&d).to_vec(), vec![0, 5]);
        assert_eq!(c.overlap(&d), 1);
    }

    #[test]
    fn serde_roundtrip() {
        let c = ErrorChain::from_edges(70, [3, 69]);
        let s = serde_json::to_string(&c).unwrap();
        let back: ErrorChain = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
    }
}
