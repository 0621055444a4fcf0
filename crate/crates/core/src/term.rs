use std::fmt;

/// The three sorts of terms, in their total-order position: constants come
/// first, then variables, then action parameters. Constants sort before
/// variables so a variable lower in a diagram can be bound to a constant
/// above it, and action parameters come last because object maximization
/// later turns them into variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermSort {
    Constant,
    Variable,
    ActionParam,
}

/// A term: a constant, a variable, or an action parameter.
///
/// Equality and ordering are (sort, name); names are compared
/// lexicographically within a sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    sort: TermSort,
    name: String,
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term {
            sort: TermSort::Constant,
            name: name.into(),
        }
    }

    pub fn variable(name: impl Into<String>) -> Self {
        Term {
            sort: TermSort::Variable,
            name: name.into(),
        }
    }

    pub fn action_param(name: impl Into<String>) -> Self {
        Term {
            sort: TermSort::ActionParam,
            name: name.into(),
        }
    }

    pub fn sort(&self) -> TermSort {
        self.sort
    }

    /// Bare name, without the `*` marker used for action parameters in the
    /// textual syntax.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_variable(&self) -> bool {
        self.sort == TermSort::Variable
    }

    pub fn is_constant(&self) -> bool {
        self.sort == TermSort::Constant
    }

    pub fn is_action_param(&self) -> bool {
        self.sort == TermSort::ActionParam
    }

    /// Display name. Action parameters carry a trailing `*`, which is also
    /// how the file syntax spells them, so valuation keys and printed
    /// diagrams round-trip.
    pub fn key(&self) -> String {
        match self.sort {
            TermSort::ActionParam => format!("{}*", self.name),
            _ => self.name.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sort {
            TermSort::ActionParam => write!(f, "{}*", self.name),
            _ => write!(f, "{}", self.name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sort_order_is_constant_variable_param() {
        let c = Term::constant("zzz");
        let v = Term::variable("aaa");
        let p = Term::action_param("aaa");
        assert!(c < v);
        assert!(v < p);
        assert!(Term::variable("x") < Term::variable("y"));
    }
}
