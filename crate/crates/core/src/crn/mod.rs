//! Chemical reaction networks under stochastic mass-action semantics.

mod parse;

use std::fmt;

use num::bigint::BigInt;
use num::{One, Zero};

pub use parse::parse_crn;

use crate::error::{Error, Result};
use crate::magnitude::{format_exact, to_f64, Exact};

/// A vector of species populations.
pub type ConcreteState = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub label: String,
    /// Reactant complex, one entry per species.
    pub reactants: Vec<u32>,
    /// Product complex, one entry per species.
    pub products: Vec<u32>,
    /// Rate coefficient in the model's time unit, kept exactly as written.
    pub rate: Exact,
    /// `products - reactants`.
    pub change: Vec<i64>,
}

impl Reaction {
    pub fn new(label: impl Into<String>, reactants: Vec<u32>, products: Vec<u32>, rate: Exact) -> Result<Self> {
        if reactants.len() != products.len() {
            return Err(Error::Invalid("reactant and product vectors differ in length".into()));
        }
        if rate <= Exact::zero() {
            return Err(Error::NonPositive(format_exact(&rate)));
        }
        let change = products.iter().zip(&reactants).map(|(&p, &r)| p as i64 - r as i64).collect();
        Ok(Reaction { label: label.into(), reactants, products, rate, change })
    }

    pub fn rate_f64(&self) -> f64 {
        to_f64(&self.rate)
    }

    /// True iff every reactant is present in sufficient number.
    pub fn enabled(&self, state: &[u64]) -> bool {
        self.reactants.iter().zip(state).all(|(&r, &x)| x >= r as u64)
    }

    /// `state + change`; fails if the reaction is not enabled.
    pub fn apply(&self, state: &[u64]) -> Result<ConcreteState> {
        if !self.enabled(state) {
            return Err(Error::NotEnabled { reaction: self.label.clone(), state: state.to_vec() });
        }
        Ok(state.iter().zip(&self.change).map(|(&x, &d)| (x as i64 + d) as u64).collect())
    }

    /// `state + n * change`, or `None` if some population would go negative.
    pub fn apply_n(&self, state: &[u64], n: u64) -> Option<ConcreteState> {
        state
            .iter()
            .zip(&self.change)
            .map(|(&x, &d)| {
                let v = x as i128 + d as i128 * n as i128;
                (v >= 0).then_some(v as u64)
            })
            .collect()
    }

    /// Stochastic mass-action propensity `k * prod_l binom(x_l, r_l)`.
    pub fn propensity(&self, state: &[u64]) -> f64 {
        let mut a = self.rate_f64();
        for (&r, &x) in self.reactants.iter().zip(state) {
            if r > 0 {
                a *= binomial_f64(x, r);
            }
        }
        a
    }

    /// The same propensity as an exact rational.
    pub fn propensity_exact(&self, state: &[u64]) -> Exact {
        let mut c = BigInt::one();
        for (&r, &x) in self.reactants.iter().zip(state) {
            if r > 0 {
                c *= binomial(x, r);
            }
        }
        &self.rate * Exact::from_integer(c)
    }

    pub fn is_identity(&self) -> bool {
        self.change.iter().all(|&d| d == 0)
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u32) -> BigInt {
    if (k as u64) > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k as u64 {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn binomial_f64(n: u64, k: u32) -> f64 {
    if (k as u64) > n {
        return 0.0;
    }
    (0..k as u64).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A chemical reaction network with an initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crn {
    pub species: Vec<Species>,
    pub reactions: Vec<Reaction>,
    pub initial: ConcreteState,
    /// Display-only label of the time unit.
    pub time_unit: Option<String>,
}

impl Crn {
    pub fn new(names: &[&str], reactions: Vec<Reaction>, initial: ConcreteState) -> Result<Self> {
        let species: Vec<Species> =
            names.iter().enumerate().map(|(index, n)| Species { name: n.to_string(), index }).collect();
        let crn = Crn { species, reactions, initial, time_unit: None };
        crn.check()?;
        Ok(crn)
    }

    pub(crate) fn check(&self) -> Result<()> {
        let n = self.species.len();
        for (i, s) in self.species.iter().enumerate() {
            if self.species[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::Invalid(format!("duplicate species `{}`", s.name)));
            }
            if s.index != i {
                return Err(Error::Invalid(format!("species `{}` has index {} at position {i}", s.name, s.index)));
            }
        }
        if self.initial.len() != n {
            return Err(Error::Invalid("initial state has wrong length".into()));
        }
        for r in &self.reactions {
            if r.reactants.len() != n || r.products.len() != n {
                return Err(Error::Invalid(format!("reaction `{}` has wrong vector length", r.label)));
            }
        }
        Ok(())
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn reaction(&self, label: &str) -> Option<&Reaction> {
        self.reactions.iter().find(|r| r.label == label)
    }

    /// Largest reactant multiplicity of each species over all reactions.
    pub fn max_reactant_multiplicity(&self) -> Vec<u32> {
        (0..self.num_species()).map(|l| self.reactions.iter().map(|r| r.reactants[l]).max().unwrap_or(0)).collect()
    }

    /// Sum of propensities of all reactions moving `from` to `to`.
    pub fn total_rate(&self, from: &[u64], to: &[u64]) -> f64 {
        self.reactions
            .iter()
            .filter(|r| r.enabled(from))
            .filter(|r| r.apply(from).map(|next| next == to).unwrap_or(false))
            .map(|r| r.propensity(from))
            .sum()
    }

    /// Multiplies every rate coefficient by `factor`.
    pub fn scaled(&self, factor: &Exact) -> Crn {
        let mut out = self.clone();
        for r in &mut out.reactions {
            r.rate = &r.rate * factor;
        }
        out
    }

    pub fn format_state(&self, state: &[u64]) -> String {
        let parts: Vec<String> = state.iter().map(|x| x.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for Crn {
    /// Renders the network in the model file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.species.iter().map(|s| s.name.as_str()).collect();
        writeln!(f, "species {}", names.join(", "))?;
        if let Some(unit) = &self.time_unit {
            writeln!(f, "unit {unit}")?;
        }
        let init: Vec<String> =
            names.iter().zip(&self.initial).filter(|(_, &x)| x > 0).map(|(n, x)| format!("{n}={x}")).collect();
        if !init.is_empty() {
            writeln!(f, "init {}", init.join(", "))?;
        }
        let complex = |v: &[u32]| {
            let terms: Vec<String> = v
                .iter()
                .zip(&names)
                .filter(|(&c, _)| c > 0)
                .map(|(&c, n)| if c == 1 { n.to_string() } else { format!("{c} {n}") })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        for r in &self.reactions {
            writeln!(
                f,
                "r {}: {} -> {} @ {}",
                r.label,
                complex(&r.reactants),
                complex(&r.products),
                exact_decimal(&r.rate)
            )?;
        }
        Ok(())
    }
}

/// Renders an exact rational as a decimal literal when it has a finite
/// expansion (always true for rates parsed from decimals).
fn exact_decimal(value: &Exact) -> String {
    let mut den = value.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0i32, 0i32);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}", to_f64(value));
    }
    let shift = twos.max(fives);
    let scaled = value * crate::magnitude::pow10(shift);
    if shift == 0 {
        scaled.numer().to_string()
    } else {
        format!("{}e-{}", scaled.numer(), shift)
    }
}
