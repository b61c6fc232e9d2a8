use serde::Serialize;

/// Failures kept verbatim per report; the rest are only counted.
const KEPT_FAILURES: usize = 32;

/// Outcome of running one named invariant over many cases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    /// Records one case; `detail` is only evaluated on failure.
    pub fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(detail());
        }
    }

    /// Records a failed case without a matching success path.
    pub fn fail(&mut self, detail: String) {
        self.failed += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(detail);
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    /// Folds another report's counts into this one.
    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        self.failed += other.failed;
        let room = KEPT_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(
            other
                .failures
                .into_iter()
                .take(room)
                .map(|f| format!("{}: {f}", other.name)),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_truncates() {
        let mut r = Report::new("demo");
        for i in 0..100 {
            r.check(i % 2 == 0, || format!("odd {i}"));
        }
        assert_eq!(r.checked, 100);
        assert_eq!(r.failed, 50);
        assert_eq!(r.failures.len(), KEPT_FAILURES);
        assert!(!r.passed());

        let mut total = Report::new("all");
        total.absorb(r);
        assert_eq!(total.failed, 50);
        assert!(total.failures[0].starts_with("demo: "));
    }
}
