/// A budget of computation steps.
///
/// What counts as a step depends on the consumer: root-rule applications for
/// small-step reduction, rule instances for the big-step evaluators and
/// transitions for the stack machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    limit: u64,
    remaining: u64,
}

impl Fuel {
    pub const DEFAULT: u64 = 100_000;

    pub fn new(limit: u64) -> Fuel {
        Fuel { limit, remaining: limit }
    }

    /// Consumes one unit. Returns `false` (and consumes nothing) when empty.
    #[inline]
    pub fn take(&mut self) -> bool {
        if self.remaining == 0 {
            false
        } else {
            self.remaining -= 1;
            true
        }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn used(&self) -> u64 {
        self.limit - self.remaining
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(Self::DEFAULT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn take_until_empty() {
        let mut f = Fuel::new(2);
        assert!(f.take());
        assert!(f.take());
        assert!(!f.take());
        assert_eq!(f.used(), 2);
        assert!(f.is_empty());
    }
}
