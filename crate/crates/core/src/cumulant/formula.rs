//! The four-body spin-free cumulant in terms of Γ1, Λ2, Λ3 and Γ4, written
//! as templates whose index permutations are generated programmatically.
//!
//! Slots `0..4` stand for `P1..P4` (upper) and `Q1..Q4` (lower). Each
//! template is expanded into its orbit under simultaneous relabelling of
//! the pairs; orbit sizes reproduce the printed multiplicities.

use std::sync::OnceLock;

use super::expansion::{orbit, Block, Source, Term};

/// Orbit sizes of the listed templates, in order, excluding the crossed
/// Λ2Λ2 bracket.
pub const MULTIPLICITIES: [usize; 15] = [1, 4, 6, 3, 12, 6, 24, 12, 24, 12, 1, 6, 8, 3, 6];

const G: Source = Source::Gamma(1);
const L2: Source = Source::Lambda(2);
const L3: Source = Source::Lambda(3);

fn term(coeff: f64, blocks: &[(Source, &[usize], &[usize])]) -> Term {
    Term { coeff, blocks: blocks.iter().map(|&(s, u, l)| Block::new(s, u, l)).collect() }
}

/// `(template, listed)`; unlisted templates are the two halves of the
/// crossed bracket `(1/12){(Λ−Λ')(Λ−Λ') + 3(Λ+Λ')(Λ+Λ')}`.
fn templates() -> Vec<(Term, bool)> {
    vec![
        (term(1.0, &[(Source::Gamma(4), &[0, 1, 2, 3], &[0, 1, 2, 3])]), true),
        (term(-1.0, &[(G, &[0], &[0]), (L3, &[1, 2, 3], &[1, 2, 3])]), true),
        (term(-1.0, &[(G, &[0], &[0]), (G, &[1], &[1]), (L2, &[2, 3], &[2, 3])]), true),
        (term(-1.0, &[(L2, &[0, 1], &[0, 1]), (L2, &[2, 3], &[2, 3])]), true),
        (term(0.5, &[(G, &[0], &[1]), (L3, &[1, 2, 3], &[0, 2, 3])]), true),
        (term(0.5, &[(G, &[0], &[1]), (G, &[1], &[0]), (L2, &[2, 3], &[2, 3])]), true),
        (term(0.5, &[(G, &[0], &[0]), (G, &[1], &[2]), (L2, &[2, 3], &[1, 3])]), true),
        (term(0.5, &[(L2, &[0, 1], &[0, 2]), (L2, &[2, 3], &[1, 3])]), true),
        (term(-0.25, &[(G, &[0], &[1]), (G, &[1], &[2]), (L2, &[2, 3], &[0, 3])]), true),
        (term(-0.25, &[(G, &[0], &[2]), (G, &[1], &[3]), (L2, &[2, 3], &[0, 1])]), true),
        (term(-1.0, &[(G, &[0], &[0]), (G, &[1], &[1]), (G, &[2], &[2]), (G, &[3], &[3])]), true),
        (term(0.5, &[(G, &[0], &[1]), (G, &[1], &[0]), (G, &[2], &[2]), (G, &[3], &[3])]), true),
        (term(-0.25, &[(G, &[0], &[1]), (G, &[1], &[2]), (G, &[2], &[0]), (G, &[3], &[3])]), true),
        (term(-0.25, &[(G, &[0], &[2]), (G, &[1], &[3]), (G, &[2], &[0]), (G, &[3], &[1])]), true),
        (term(0.125, &[(G, &[0], &[1]), (G, &[1], &[2]), (G, &[2], &[3]), (G, &[3], &[0])]), true),
        // bracket: 4 Λ^{12}_{34}Λ^{34}_{12} + 2 Λ^{12}_{34}Λ^{34}_{21} + … over 12
        (term(-1.0 / 3.0, &[(L2, &[0, 1], &[2, 3]), (L2, &[2, 3], &[0, 1])]), false),
        (term(-1.0 / 6.0, &[(L2, &[0, 1], &[2, 3]), (L2, &[2, 3], &[1, 0])]), false),
    ]
}

/// Orbit sizes of every template, listed ones first.
pub fn multiplicities() -> (Vec<usize>, Vec<usize>) {
    let (mut listed, mut other) = (Vec::new(), Vec::new());
    for (t, l) in templates() {
        let size = orbit(&t, 4).len();
        if l {
            listed.push(size);
        } else {
            other.push(size);
        }
    }
    (listed, other)
}

/// Fully expanded `Λ4 = Γ4 − …`.
pub fn lambda4_terms() -> &'static [Term] {
    static TERMS: OnceLock<Vec<Term>> = OnceLock::new();
    TERMS.get_or_init(|| templates().iter().flat_map(|(t, _)| orbit(t, 4)).collect())
}

/// The expansion without its Γ4 term, negated: Γ4 under `Λ4 = 0`.
pub fn cu4_terms() -> &'static [Term] {
    static TERMS: OnceLock<Vec<Term>> = OnceLock::new();
    TERMS.get_or_init(|| {
        lambda4_terms()
            .iter()
            .filter(|t| t.blocks.iter().all(|b| b.source != Source::Gamma(4)))
            .map(|t| Term { coeff: -t.coeff, blocks: t.blocks.clone() })
            .collect()
    })
}
