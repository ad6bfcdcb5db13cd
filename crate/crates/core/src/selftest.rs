//! Randomized differential testing of every locate engine against the naive
//! oracle, with greedy shrinking of the first failing case.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fmindex::{FmIndex, SamplingStrategy};
use crate::locate::{locate_original, FmTree, FmTreeConfig, InjectedFault, UNBOUNDED};
use crate::oracle::naive_locate;
use crate::textio::{PackedText, Pattern};

const THRESHOLDS: [usize; 4] = [0, 4, 16, UNBOUNDED];

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub max_n: usize,
    pub iterations: usize,
    pub seed: u64,
    #[doc(hidden)]
    pub fault: Option<InjectedFault>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            max_n: 2000,
            iterations: 200,
            seed: 0,
            fault: None,
        }
    }
}

/// Which engine a case exercises. `threshold` is `None` for LF walks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reproducer {
    pub text: Vec<u8>,
    pub pattern: Vec<u8>,
    pub distance: usize,
    pub strategy: SamplingStrategy,
    pub threshold: Option<usize>,
    pub expected: Vec<usize>,
    pub got: Vec<usize>,
}

impl fmt::Display for Reproducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dna = |codes: &[u8]| -> String {
            codes.iter().map(|&c| crate::textio::ALPHABET[c as usize] as char).collect()
        };
        writeln!(f, "text:     {}", dna(&self.text))?;
        writeln!(f, "pattern:  {}", dna(&self.pattern))?;
        writeln!(f, "D:        {}", self.distance)?;
        writeln!(f, "sampling: {}", self.strategy)?;
        match self.threshold {
            Some(UNBOUNDED) => writeln!(f, "engine:   fmtree (threshold unbounded)")?,
            Some(t) => writeln!(f, "engine:   fmtree (threshold {t})")?,
            None => writeln!(f, "engine:   original")?,
        }
        writeln!(f, "expected: {:?}", self.expected)?;
        write!(f, "got:      {:?}", self.got)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestReport {
    pub iterations: usize,
    pub checks: u64,
    pub failure: Option<Reproducer>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn run(config: &SelftestConfig) -> Result<SelftestReport> {
    if config.max_n == 0 {
        return Err(Error::InvalidArgument("max-n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = 0u64;
    for iteration in 0..config.iterations {
        let n = rng.random_range(1..=config.max_n);
        let text: Vec<u8> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let distance = rng.random_range(2..=8);
        let packed = PackedText::from_codes(&text, config.seed)?;
        let indexes = FmIndex::build_many(
            &packed,
            &[(distance, SamplingStrategy::Value), (distance, SamplingStrategy::Subscript)],
        )?;
        for _ in 0..8 {
            let pattern = random_pattern(&mut rng, &text);
            for index in &indexes {
                for threshold in engines_for(index.strategy()) {
                    checks += 1;
                    if let Some(found) =
                        check(&packed, index, &pattern, threshold, config.fault)?
                    {
                        let failure = shrink(found, config.fault)?;
                        return Ok(SelftestReport {
                            iterations: iteration + 1,
                            checks,
                            failure: Some(failure),
                        });
                    }
                }
            }
        }
    }
    Ok(SelftestReport {
        iterations: config.iterations,
        checks,
        failure: None,
    })
}

fn engines_for(strategy: SamplingStrategy) -> Vec<Option<usize>> {
    match strategy {
        SamplingStrategy::Value => std::iter::once(None)
            .chain(THRESHOLDS.iter().map(|&t| Some(t)))
            .collect(),
        SamplingStrategy::Subscript => vec![None],
    }
}

/// Mostly substrings of the text, sometimes arbitrary strings.
fn random_pattern(rng: &mut ChaCha8Rng, text: &[u8]) -> Vec<u8> {
    let len = rng.random_range(1..=text.len().min(12));
    if rng.random_bool(0.8) {
        let start = rng.random_range(0..=text.len() - len);
        text[start..start + len].to_vec()
    } else {
        (0..len).map(|_| rng.random_range(0..4)).collect()
    }
}

fn check(
    text: &PackedText,
    index: &FmIndex,
    pattern: &[u8],
    threshold: Option<usize>,
    fault: Option<InjectedFault>,
) -> Result<Option<Reproducer>> {
    let p = Pattern::from_codes(pattern.to_vec())?;
    let expected = naive_locate(text, &p);
    let search = index.backward_search(&p);
    let result = match threshold {
        Some(threshold) => {
            let config = FmTreeConfig {
                fault,
                ..FmTreeConfig::with_threshold(threshold)
            };
            FmTree::new(index, config)?.locate_ranges(p.first(), search.range, search.penult)
        }
        None => locate_original(index, search.range),
    };
    let got = result.sorted_positions();
    let duplicate = got.len() != result.positions.len();
    Ok((got != expected || duplicate).then(|| Reproducer {
        text: text.to_codes(),
        pattern: pattern.to_vec(),
        distance: index.distance(),
        strategy: index.strategy(),
        threshold,
        expected,
        got,
    }))
}

fn recheck(case: &Reproducer, fault: Option<InjectedFault>) -> Result<Option<Reproducer>> {
    if case.text.is_empty() || case.pattern.is_empty() {
        return Ok(None);
    }
    let text = PackedText::from_codes(&case.text, 0)?;
    let index = FmIndex::build(&text, case.distance, case.strategy)?;
    check(&text, &index, &case.pattern, case.threshold, fault)
}

/// Deletes chunks of the text, then of the pattern, while the case still
/// fails, halving the chunk size down to single characters.
fn shrink(mut case: Reproducer, fault: Option<InjectedFault>) -> Result<Reproducer> {
    loop {
        let before = (case.text.len(), case.pattern.len());
        for field in [Field::Text, Field::Pattern] {
            let mut chunk = field.get(&case).len().div_ceil(2);
            while chunk > 0 {
                let mut start = 0;
                while start < field.get(&case).len() {
                    let mut candidate = case.clone();
                    let codes = field.get_mut(&mut candidate);
                    let end = (start + chunk).min(codes.len());
                    codes.drain(start..end);
                    match recheck(&candidate, fault)? {
                        Some(smaller) => case = smaller,
                        None => start += chunk,
                    }
                }
                chunk /= 2;
            }
        }
        if (case.text.len(), case.pattern.len()) == before {
            return Ok(case);
        }
    }
}

#[derive(Clone, Copy)]
enum Field {
    Text,
    Pattern,
}

impl Field {
    fn get(self, case: &Reproducer) -> &Vec<u8> {
        match self {
            Field::Text => &case.text,
            Field::Pattern => &case.pattern,
        }
    }

    fn get_mut(self, case: &mut Reproducer) -> &mut Vec<u8> {
        match self {
            Field::Text => &mut case.text,
            Field::Pattern => &mut case.pattern,
        }
    }
}
