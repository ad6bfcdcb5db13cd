/// A sequence of text positions stored as `u32` when every value fits, else `u64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positions {
    Narrow(Vec<u32>),
    Wide(Vec<u64>),
}

impl Positions {
    /// Empty sequence wide enough for positions of a text of length `text_len`.
    pub fn for_text_len(text_len: usize, capacity: usize) -> Self {
        if Self::needs_wide(text_len) {
            Positions::Wide(Vec::with_capacity(capacity))
        } else {
            Positions::Narrow(Vec::with_capacity(capacity))
        }
    }

    pub fn needs_wide(text_len: usize) -> bool {
        text_len as u64 > u32::MAX as u64
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        match self {
            Positions::Narrow(v) => v[i] as usize,
            Positions::Wide(v) => v[i] as usize,
        }
    }

    #[inline]
    pub fn push(&mut self, value: usize) {
        match self {
            Positions::Narrow(v) => v.push(value as u32),
            Positions::Wide(v) => v.push(value as u64),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Positions::Narrow(v) => v.len(),
            Positions::Wide(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_wide(&self) -> bool {
        matches!(self, Positions::Wide(_))
    }

    /// Bytes per stored entry.
    pub fn entry_width(&self) -> usize {
        if self.is_wide() {
            8
        } else {
            4
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}
