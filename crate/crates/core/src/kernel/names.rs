use std::sync::atomic::{AtomicU64, Ordering};

use super::formula::Name;
use super::term::Term;

/// Source of globally fresh names of the form `base#n`.
#[derive(Debug)]
pub struct NameSupply {
    next: AtomicU64,
}

impl Default for NameSupply {
    fn default() -> Self {
        NameSupply::new()
    }
}

impl NameSupply {
    pub fn new() -> Self {
        NameSupply::starting_at(1)
    }

    pub fn starting_at(n: u64) -> Self {
        NameSupply {
            next: AtomicU64::new(n.max(1)),
        }
    }

    /// A supply whose names cannot collide with any `#n` name already in `t`.
    pub fn avoiding(t: &Term) -> Self {
        let mut max = 0;
        t.visit(&mut |_, s| {
            let name = match s {
                Term::Var { name, .. } => Some(name),
                other => other.binder(),
            };
            if let Some(k) = name.and_then(Name::suffix) {
                max = max.max(k);
            }
        });
        NameSupply::starting_at(max + 1)
    }

    pub fn fresh(&self, hint: &Name) -> Name {
        self.fresh_str(hint.base())
    }

    pub fn fresh_str(&self, hint: &str) -> Name {
        let base = Name::new(hint);
        let k = self.next.fetch_add(1, Ordering::SeqCst);
        Name::new(&format!("{}#{k}", base.base()))
    }

    /// The counter value the next fresh name will use.
    pub fn peek(&self) -> u64 {
        self.next.load(Ordering::SeqCst)
    }

    pub fn advance_to(&self, n: u64) {
        self.next.fetch_max(n, Ordering::SeqCst);
    }
}

impl Clone for NameSupply {
    fn clone(&self) -> Self {
        NameSupply::starting_at(self.peek())
    }
}
