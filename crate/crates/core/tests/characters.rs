//! Kazhdan projections from the character table of SL(2, Z/3), stored as
//! a fixture computed independently of this crate.

use std::sync::Arc;

use coarse_core::groups::{CharacterTable, FiniteGroup, QuotientTower};
use coarse_core::index::d_sequence;
use coarse_core::operators::{BlockOperator, IndexSpace};
use coarse_core::spectral::{kazhdan_projection, laplacian, tower_kazhdan_projection};

const TABLE: &str = include_str!("data/sl2_3.chars");

#[test]
fn sl2_3_isotypical_projections() {
    let g = FiniteGroup::sl2(3).unwrap();
    let table = CharacterTable::load(TABLE, &g).unwrap();
    assert!(table.orthogonality_residual() < 1e-9);
    let dims: Vec<usize> = table.characters().iter().map(|c| c.dim).collect();
    assert_eq!(dims, vec![1, 1, 1, 2, 2, 2, 3]);

    let cay = g.cayley_graph().unwrap();
    let s = IndexSpace::graph("SL2(3)", &cay);
    let lap = laplacian(&cay, s.clone(), 1).unwrap();
    let mut sum = BlockOperator::zero(s.clone(), 1);
    for c in table.characters() {
        let p = kazhdan_projection(&g, c, s.clone()).unwrap();
        assert!(p.mul(&p).unwrap().sub(&p).unwrap().max_abs_entry() < 1e-10);
        assert!(p.sub(&p.adjoint()).unwrap().max_abs_entry() < 1e-10);
        assert!((p.trace().re - (c.dim * c.dim) as f64).abs() < 1e-9);
        // right-Cayley Laplacian commutes with the left-regular isotypical projections
        let comm = lap.mul(&p).unwrap().sub(&p.mul(&lap).unwrap()).unwrap();
        assert!(comm.max_abs_entry() < 1e-10);
        sum = sum.add(&p).unwrap();
    }
    assert!(sum.sub(&BlockOperator::identity(s, 1)).unwrap().max_abs_entry() < 1e-10);
}

#[test]
fn table_round_trips() {
    let g = FiniteGroup::sl2(3).unwrap();
    let table = CharacterTable::load(TABLE, &g).unwrap();
    assert_eq!(CharacterTable::load(&table.to_text(), &g).unwrap(), table);
}

#[test]
fn non_abelian_tower_d_sequence() {
    let tower = QuotientTower::sl2(3, 3, 2).unwrap();
    let x = Arc::new(tower.space_of_graphs().unwrap());
    let space = IndexSpace::space("sl2 tower", x.clone());
    let table = CharacterTable::load(TABLE, tower.level(0)).unwrap();
    for c in table.characters() {
        let p = tower_kazhdan_projection(&tower, 0, c, space.clone()).unwrap();
        let ranks = d_sequence(&p, &x).unwrap().ranks();
        assert_eq!(ranks, vec![Some(c.dim * c.dim); 2]);
    }
}

#[test]
fn cyclic_tower_d_sequence() {
    let tower = QuotientTower::cyclic(3, 2, 5).unwrap();
    let x = Arc::new(tower.space_of_graphs().unwrap());
    let space = IndexSpace::space("cyclic tower", x.clone());
    let table = CharacterTable::abelian_characters(tower.level(2)).unwrap();
    // χ_j(x) = e^{2πijx/12} factors through Z/3 iff 4 | j and through Z/6 iff 2 | j
    for (j, first) in [(0, 0), (1, 2), (2, 1), (4, 0), (6, 1), (11, 2)] {
        let p = tower_kazhdan_projection(&tower, 2, &table.characters()[j], space.clone()).unwrap();
        let expected: Vec<_> = (0..5).map(|n| Some(usize::from(n >= first))).collect();
        assert_eq!(d_sequence(&p, &x).unwrap().ranks(), expected, "chi{j}");
    }
}
