use crate::multilinear::{FMat, QMat};
use crate::tuple::MatrixTuple;
use crate::{Error, Result};

/// A finite word over `{1,..,N}`, stored with 1-based symbols.
/// The empty word is the monoid identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<u8>,
}

impl Word {
    pub fn empty() -> Self {
        Word {
            symbols: Vec::new(),
        }
    }

    pub fn new(symbols: Vec<u8>, alphabet: usize) -> Result<Self> {
        for &s in &symbols {
            if s == 0 || s as usize > alphabet {
                return Err(Error::Input(format!(
                    "symbol {s} outside the alphabet 1..={alphabet}"
                )));
            }
        }
        Ok(Word { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word { symbols }
    }

    /// Prepend a single symbol (the cylinder `[i w]`).
    pub fn prepend(&self, symbol: u8) -> Word {
        let mut symbols = Vec::with_capacity(self.len() + 1);
        symbols.push(symbol);
        symbols.extend_from_slice(&self.symbols);
        Word { symbols }
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "()");
        }
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 && self.symbols.iter().any(|&x| x > 9) {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// `N^n` with an overflow guard.
pub fn word_count(alphabet: usize, n: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(alphabet as u64)?;
    }
    Some(acc)
}

/// Lexicographic iterator over all words of length `n`.
pub struct WordIter {
    alphabet: usize,
    current: Option<Vec<u8>>,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.current.as_mut()?;
        let out = Word {
            symbols: current.clone(),
        };
        // advance odometer
        let mut pos = current.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if (current[pos] as usize) < self.alphabet {
                current[pos] += 1;
                for p in pos + 1..current.len() {
                    current[p] = 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All `N^n` words of length `n` in lexicographic order, subject to the
/// word budget.
pub fn enumerate_words(alphabet: usize, n: usize, budget: u64) -> Result<WordIter> {
    if alphabet < 2 {
        return Err(Error::Input(format!(
            "alphabet size {alphabet} must be at least 2"
        )));
    }
    match word_count(alphabet, n) {
        Some(c) if c <= budget => {}
        _ => {
            return Err(Error::Budget(format!(
                "enumerating {alphabet}^{n} words exceeds the budget of {budget}"
            )))
        }
    }
    Ok(WordIter {
        alphabet,
        current: Some(vec![1; n]),
    })
}

/// Left-to-right product `A_{i_1} ... A_{i_n}` on the float backend.
/// The empty word gives the identity.
pub fn word_product(tuple: &MatrixTuple, word: &Word) -> Result<FMat> {
    let mut acc = FMat::identity(tuple.dim());
    for &s in word.symbols() {
        let idx = s as usize - 1;
        if idx >= tuple.count() {
            return Err(Error::Input(format!(
                "symbol {s} outside the tuple of {} matrices",
                tuple.count()
            )));
        }
        acc = acc.mul(&tuple.float_mats()[idx]);
    }
    Ok(acc)
}

/// Exact word product on the rational backend.
pub fn word_product_exact(tuple: &MatrixTuple, word: &Word) -> Result<QMat> {
    let mats = tuple
        .exact_mats()
        .ok_or_else(|| Error::Input("tuple has no exact backend".into()))?;
    let mut acc = QMat::identity(tuple.dim());
    for &s in word.symbols() {
        let idx = s as usize - 1;
        if idx >= mats.len() {
            return Err(Error::Input(format!(
                "symbol {s} outside the tuple of {} matrices",
                mats.len()
            )));
        }
        acc = acc.mul(&mats[idx]);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_rational;

    #[test]
    fn enumeration_is_lexicographic() {
        let words: Vec<String> = enumerate_words(2, 2, 1 << 20)
            .unwrap()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(words, vec!["11", "12", "21", "22"]);
        let empty: Vec<Word> = enumerate_words(2, 0, 1 << 20).unwrap().collect();
        assert_eq!(empty, vec![Word::empty()]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_words(3, 4, 1 << 20).unwrap().count(), 81);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_words(2, 40, 1 << 24),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn empty_word_is_identity() {
        let q = |s: &str| parse_rational(s).unwrap();
        let a = QMat::from_rows(vec![vec![q("2"), q("1")], vec![q("0"), q("1")]]).unwrap();
        let b = QMat::from_rows(vec![vec![q("1"), q("0")], vec![q("3"), q("1")]]).unwrap();
        let t = MatrixTuple::from_rational(vec![a.clone(), b], None).unwrap();
        let id = word_product_exact(&t, &Word::empty()).unwrap();
        assert_eq!(id, QMat::identity(2));
        let first = word_product_exact(&t, &Word::new(vec![1], 2).unwrap()).unwrap();
        assert_eq!(first, a);
    }

    #[test]
    fn concatenation_multiplies_exactly() {
        let q = |s: &str| parse_rational(s).unwrap();
        let a = QMat::from_rows(vec![vec![q("2"), q("1/3")], vec![q("-1"), q("1")]]).unwrap();
        let b = QMat::from_rows(vec![vec![q("1/2"), q("0")], vec![q("3"), q("-2")]]).unwrap();
        let t = MatrixTuple::from_rational(vec![a, b], None).unwrap();
        let i = Word::new(vec![1, 2, 2], 2).unwrap();
        let j = Word::new(vec![2, 1], 2).unwrap();
        let lhs = word_product_exact(&t, &i.concat(&j)).unwrap();
        let rhs = word_product_exact(&t, &i)
            .unwrap()
            .mul(&word_product_exact(&t, &j).unwrap());
        assert_eq!(lhs, rhs);
    }
}
