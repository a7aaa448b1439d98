//! Fact store and expected tables shipped with the crate.

/// Facts used by default when no fact file is given.
pub const FACTS: &str = include_str!("../data/facts.txt");

/// Quotients with `Q`-gonality 4 and `d != N`.
pub const TETRAGONAL: &str = include_str!("../data/tetragonal.txt");

/// Genus-4 quotients with `Q`-gonality 3.
pub const TRIGONAL_GENUS4: &str = include_str!("../data/trigonal.txt");

/// Fricke quotients `X0(N)/w_N` with known `Q`-gonality 4.
pub const FRICKE_TETRAGONAL: &str = include_str!("../data/fricke.txt");

/// The shipped fact store.
pub fn shipped_facts() -> crate::Result<crate::facts::FactStore> {
    crate::facts::parse_facts(FACTS).map_err(Into::into)
}
