//! Cooperative games as dense value tables indexed by coalition bitset.

use crate::coalition::{apply_permutation, check_player_count, Coalition, PlayerId};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, ScalarMode};

pub use crate::coalition::Permutation;

/// Relative tolerance for float-mode equality tests on game values.
pub const FLOAT_GAME_TOLERANCE: f64 = 1e-9;

/// A TU game: one value per coalition, `v(∅) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Game<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> Game<T> {
    /// Builds a game from a table of `2^n` values in bitset order.
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        check_player_count(n)?;
        if values.len() != 1 << n {
            return Err(Error::Validation(format!(
                "a game on {n} players needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::Validation(format!(
                "v(∅) must be 0, got {}",
                values[0].render()
            )));
        }
        for x in &values {
            x.check()?;
        }
        Ok(Game { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(Coalition) -> T) -> Result<Self> {
        check_player_count(n)?;
        let values = (0..1u32 << n).map(|b| f(Coalition::from_bits(b))).collect();
        Game::new(n, values)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Game::from_fn(n, |_| T::zero())
    }

    pub fn players(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn value(&self, s: Coalition) -> &T {
        &self.values[s.index()]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn grand_value(&self) -> &T {
        &self.values[self.values.len() - 1]
    }

    /// Marginal contribution `v(S ∪ {i}) − v(S)` for `i ∉ S`.
    #[inline]
    pub fn marginal(&self, s: Coalition, i: PlayerId) -> T {
        self.value(s.with(i)).clone() - self.value(s).clone()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> Game<f64> {
        Game {
            n: self.n,
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Exact image in rational mode (floats convert through their binary expansion).
    pub fn to_rational(&self) -> Game<Rational> {
        Game {
            n: self.n,
            values: self.values.iter().map(Scalar::to_rational).collect(),
        }
    }

    /// Wraps a value table whose `∅` entry is known to be zero.
    pub(crate) fn from_raw(n: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), 1 << n);
        Game { n, values }
    }
}

/// A game whose scalar mode is chosen at runtime (e.g. from a file).
#[derive(Debug, Clone, PartialEq)]
pub enum DynGame {
    Rational(Game<Rational>),
    Float(Game<f64>),
}

impl DynGame {
    pub fn mode(&self) -> ScalarMode {
        match self {
            DynGame::Rational(_) => ScalarMode::Rational,
            DynGame::Float(_) => ScalarMode::Float,
        }
    }

    pub fn players(&self) -> usize {
        match self {
            DynGame::Rational(g) => g.players(),
            DynGame::Float(g) => g.players(),
        }
    }

    /// `alpha·v + alpha2·v2`; both games must share a scalar mode.
    pub fn linear_combine(
        alpha: &Rational,
        v: &DynGame,
        alpha2: &Rational,
        v2: &DynGame,
    ) -> Result<DynGame> {
        match (v, v2) {
            (DynGame::Rational(a), DynGame::Rational(b)) => Ok(DynGame::Rational(
                linear_combine(alpha, a, alpha2, b)?,
            )),
            (DynGame::Float(a), DynGame::Float(b)) => Ok(DynGame::Float(linear_combine(
                &f64::from_rational(alpha),
                a,
                &f64::from_rational(alpha2),
                b,
            )?)),
            _ => Err(Error::ModeMismatch(format!(
                "cannot combine a {} game with a {} game",
                v.mode(),
                v2.mode()
            ))),
        }
    }
}

impl From<Game<Rational>> for DynGame {
    fn from(g: Game<Rational>) -> Self {
        DynGame::Rational(g)
    }
}

impl From<Game<f64>> for DynGame {
    fn from(g: Game<f64>) -> Self {
        DynGame::Float(g)
    }
}

/// Three players; player 0 holds a left glove, players 1 and 2 a right glove.
/// A coalition is worth 1 when it can form a pair.
pub fn make_glove_game() -> Game<Rational> {
    Game::from_fn(3, |s| {
        let pair = s.contains(PlayerId(0)) && (s.contains(PlayerId(1)) || s.contains(PlayerId(2)));
        Rational::from_i64(i64::from(pair))
    })
    .expect("glove game is well formed")
}

/// `v(N) = total`, zero elsewhere.
pub fn make_pure_bargaining_game<T: Scalar>(n: usize, total: T) -> Result<Game<T>> {
    if n == 0 {
        return Err(Error::Validation("pure bargaining needs at least one player".into()));
    }
    let grand = Coalition::grand(n);
    Game::from_fn(n, |s| if s == grand { total.clone() } else { T::zero() })
}

/// Additive game `v(S) = Σ_{i∈S} x_i`.
pub fn make_inessential_game<T: Scalar>(singleton_values: &[T]) -> Result<Game<T>> {
    Game::from_fn(singleton_values.len(), |s| {
        s.members().map(|p| singleton_values[p.0].clone()).sum()
    })
}

/// Whether every coalition is worth the sum of its members' singleton values.
pub fn is_inessential<T: Scalar>(v: &Game<T>) -> bool {
    let scale = v.sup_norm();
    let n = v.players();
    let singles: Vec<T> = (0..n)
        .map(|i| v.value(Coalition::singleton(PlayerId(i))).clone())
        .collect();
    (0..1u32 << n).all(|b| {
        let s = Coalition::from_bits(b);
        let additive: T = s.members().map(|p| singles[p.0].clone()).sum();
        (v.value(s).clone() - additive).is_negligible(FLOAT_GAME_TOLERANCE, scale)
    })
}

/// `(σ*v)(S) = v(σ(S))`.
pub fn pullback<T: Scalar>(sigma: &Permutation, v: &Game<T>) -> Result<Game<T>> {
    if sigma.len() != v.players() {
        return Err(Error::Validation(format!(
            "permutation of {} players applied to a {}-player game",
            sigma.len(),
            v.players()
        )));
    }
    let values = (0..1u32 << v.players())
        .map(|b| {
            let image = apply_permutation(sigma, Coalition::from_bits(b))?;
            Ok(v.value(image).clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Game::from_raw(v.players(), values))
}

/// Pointwise `alpha·v + alpha2·v2`.
pub fn linear_combine<T: Scalar>(alpha: &T, v: &Game<T>, alpha2: &T, v2: &Game<T>) -> Result<Game<T>> {
    if v.players() != v2.players() {
        return Err(Error::Validation(format!(
            "cannot combine games on {} and {} players",
            v.players(),
            v2.players()
        )));
    }
    let values = v
        .values
        .iter()
        .zip(&v2.values)
        .map(|(a, b)| alpha.clone() * a.clone() + alpha2.clone() * b.clone())
        .collect();
    Ok(Game::from_raw(v.players(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num::{One, Zero};
    use proptest::prelude::*;

    fn c(m: &[usize]) -> Coalition {
        Coalition::from_members(m.iter().copied())
    }

    #[test]
    fn glove_values() {
        let g = make_glove_game();
        assert_eq!(*g.value(c(&[0, 1])), Rational::one());
        assert_eq!(*g.value(c(&[1, 2])), Rational::zero());
        assert_eq!(*g.value(Coalition::EMPTY), Rational::zero());
        assert_eq!(*g.grand_value(), Rational::one());
    }

    #[test]
    fn rejects_nonzero_empty_value() {
        let err = Game::new(1, vec![rational(1, 2), rational(1, 1)]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(Game::new(2, vec![0.0; 3]).is_err());
        assert!(Game::new(1, vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn pure_bargaining() {
        let g = make_pure_bargaining_game(3, rational(1, 1)).unwrap();
        assert_eq!(*g.grand_value(), rational(1, 1));
        assert_eq!(*g.value(c(&[0, 1])), rational(0, 1));
        let g = make_pure_bargaining_game(1, rational(5, 1)).unwrap();
        assert_eq!(*g.value(c(&[0])), rational(5, 1));
        assert!(make_pure_bargaining_game(0, 1.0).is_err());
    }

    #[test]
    fn inessential_games() {
        let x = [rational(1, 1), rational(2, 1), rational(3, 1)];
        let g = make_inessential_game(&x).unwrap();
        assert_eq!(*g.value(c(&[0, 2])), rational(4, 1));
        assert_eq!(*g.grand_value(), rational(6, 1));
        assert!(is_inessential(&g));
        let z = make_inessential_game(&[rational(0, 1), rational(0, 1)]).unwrap();
        assert_eq!(z, Game::zero(2).unwrap());
        assert!(is_inessential(&z));
        assert!(!is_inessential(&make_glove_game()));
    }

    #[test]
    fn float_inessential_tolerance() {
        let g = make_inessential_game(&[0.1, 0.2, 0.3]).unwrap();
        assert!(is_inessential(&g));
        let mut vals = g.clone().into_values();
        vals[7] += 1e-6;
        assert!(!is_inessential(&Game::new(3, vals).unwrap()));
    }

    #[test]
    fn glove_pullbacks() {
        let g = make_glove_game();
        assert_eq!(pullback(&Permutation::identity(3), &g).unwrap(), g);
        assert_eq!(pullback(&Permutation::swap(3, 1, 2).unwrap(), &g).unwrap(), g);
        let p = pullback(&Permutation::swap(3, 0, 1).unwrap(), &g).unwrap();
        assert_ne!(p, g);
        assert_eq!(*p.value(c(&[0, 1])), rational(1, 1));
        assert_eq!(*p.value(c(&[1, 2])), rational(1, 1));
    }

    #[test]
    fn pullback_composes_contravariantly() {
        let g = Game::from_fn(3, |s| rational(i64::from(s.bits() * s.bits()), 3)).unwrap();
        for sigma in Permutation::all(3) {
            for tau in Permutation::all(3) {
                let lhs = pullback(&sigma.compose(&tau).unwrap(), &g).unwrap();
                let rhs = pullback(&tau, &pullback(&sigma, &g).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn combinations() {
        let g = make_glove_game();
        let z = Game::zero(3).unwrap();
        let one = rational(1, 1);
        assert_eq!(linear_combine(&one, &g, &rational(0, 1), &z).unwrap(), g);
        assert_eq!(linear_combine(&one, &g, &-one.clone(), &g).unwrap(), z);
        let five = linear_combine(&rational(2, 1), &g, &rational(3, 1), &g).unwrap();
        assert_eq!(*five.value(c(&[0, 1])), rational(5, 1));
    }

    #[test]
    fn dyn_mode_mismatch() {
        let a = DynGame::from(make_glove_game());
        let b = DynGame::from(make_glove_game().to_float());
        let one = rational(1, 1);
        assert!(matches!(
            DynGame::linear_combine(&one, &a, &one, &b),
            Err(Error::ModeMismatch(_))
        ));
        assert!(DynGame::linear_combine(&one, &b, &one, &b).is_ok());
    }

    proptest! {
        #[test]
        fn additive_games_are_inessential(xs in prop::collection::vec(-50i64..50, 1..7)) {
            let q: Vec<Rational> = xs.iter().map(|&k| rational(k, 7)).collect();
            prop_assert!(is_inessential(&make_inessential_game(&q).unwrap()));
            let f: Vec<f64> = xs.iter().map(|&k| k as f64 / 7.0).collect();
            prop_assert!(is_inessential(&make_inessential_game(&f).unwrap()));
        }
    }
}
