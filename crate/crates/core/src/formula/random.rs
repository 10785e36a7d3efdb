use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Formula, PathExpr};

/// Seeded random formula over `atoms` with `depth() <= max_depth`.
///
/// The same `(seed, max_depth, atoms)` always yields the same formula.
pub fn random_formula(seed: u64, max_depth: usize, atoms: &[String]) -> Formula {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    assert!(!atoms.is_empty(), "at least one atom is required");
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        atoms,
    };
    g.formula(max_depth)
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    atoms: &'a [String],
}

impl Gen<'_> {
    fn atom(&mut self) -> Formula {
        let i = self.rng.gen_range(0..self.atoms.len());
        Formula::atom(self.atoms[i].clone())
    }

    fn leaf(&mut self) -> Formula {
        match self.rng.gen_range(0..6) {
            0 => Formula::True,
            1 => Formula::False,
            2 | 3 => self.atom(),
            _ => Formula::not(self.atom()),
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth <= 1 {
            return self.leaf();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..15) {
            0 | 1 => self.leaf(),
            2 => Formula::not(self.formula(d)),
            3 => Formula::and(self.formula(d), self.formula(d)),
            4 => Formula::or(self.formula(d), self.formula(d)),
            5 => Formula::next(self.formula(d)),
            6 => Formula::weak_next(self.formula(d)),
            7 => Formula::eventually(self.formula(d)),
            8 => Formula::always(self.formula(d)),
            9 => Formula::until(self.formula(d), self.formula(d)),
            10 => Formula::release(self.formula(d), self.formula(d)),
            11 => Formula::Last,
            12 | 13 => Formula::diamond(self.path(d), self.formula(d)),
            _ => Formula::boxed(self.path(d), self.formula(d)),
        }
    }

    fn proposition(&mut self, depth: usize) -> Formula {
        if depth <= 1 {
            return match self.rng.gen_range(0..4) {
                0 => Formula::True,
                1 | 2 => self.atom(),
                _ => Formula::not(self.atom()),
            };
        }
        match self.rng.gen_range(0..4) {
            0 | 1 => self.proposition(1),
            2 => Formula::and(self.proposition(depth - 1), self.proposition(depth - 1)),
            _ => Formula::or(self.proposition(depth - 1), self.proposition(depth - 1)),
        }
    }

    fn path(&mut self, depth: usize) -> PathExpr {
        if depth <= 1 {
            return PathExpr::Prop(self.proposition(1));
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 => PathExpr::Prop(self.proposition(depth)),
            1 => PathExpr::Test(self.formula(d)),
            2 => PathExpr::seq(self.path(d), self.path(d)),
            3 => PathExpr::alt(self.path(d), self.path(d)),
            _ => PathExpr::star(self.path(d)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, render};

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn depth_one_universe() {
        let a = Formula::atom("a");
        let universe = [Formula::True, Formula::False, a.clone(), Formula::not(a)];
        for seed in 0..50 {
            let f = random_formula(seed, 1, &names(&["a"]));
            assert!(universe.contains(&f), "{f}");
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let atoms = names(&["a", "b"]);
        assert_eq!(random_formula(7, 3, &atoms), random_formula(7, 3, &atoms));
        let f = random_formula(7, 3, &atoms);
        assert_eq!(parse_formula(&render(&f)).unwrap(), f);
    }

    #[test]
    fn respects_bounds() {
        let atoms = names(&["p", "q"]);
        for seed in 0..300 {
            let f = random_formula(seed, 4, &atoms);
            assert!(f.depth() <= 4, "{f} has depth {}", f.depth());
            assert!(f.atoms().iter().all(|a| atoms.contains(a)));
        }
    }
}
