/// The `i`-th element (1-based) of the Luby sequence 1,1,2,1,1,2,4,1,...
///
/// # Panics
/// If `i == 0`.
pub fn luby(i: u64) -> u64 {
    assert!(i >= 1, "the Luby sequence is 1-based");
    let mut i = i;
    loop {
        // Smallest k with 2^k - 1 >= i.
        let k = 64 - i.leading_zeros() as u64;
        if i == (1u64 << k) - 1 {
            return 1 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Failure budgets `scale * luby(i)` for successive restarts.
#[derive(Debug, Clone)]
pub struct LubySchedule {
    scale: u64,
    next: u64,
}

impl LubySchedule {
    pub fn new(scale: u64) -> Self {
        Self { scale, next: 1 }
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }
}

impl Iterator for LubySchedule {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let budget = self.scale.saturating_mul(luby(self.next));
        self.next += 1;
        Some(budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_terms() {
        let got: Vec<u64> = (1..=7).map(luby).collect();
        assert_eq!(got, vec![1, 1, 2, 1, 1, 2, 4]);
        assert_eq!(luby(8), 1);
        assert_eq!(luby(15), 8);
    }

    #[test]
    fn schedule_scales() {
        let got: Vec<u64> = LubySchedule::new(32).take(4).collect();
        assert_eq!(got, vec![32, 32, 64, 32]);
    }
}
