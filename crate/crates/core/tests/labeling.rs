mod oracles;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use terrasect::geometry::Point;
use terrasect::labeling::label_components;
use terrasect::map::TileGrid;
use terrasect::Tile;

use oracles::*;

#[test]
fn partition_matches_flood_fill_and_contours_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut holes_seen = 0;
    for case in 0..200 {
        let g = random_grid(&mut rng, 32, 32, [0.35, 0.5, 0.65, 0.8][case % 4]);
        match check_labeling(&g) {
            Ok(holes) => holes_seen += holes,
            Err(e) => panic!("grid {case}: {e}"),
        }
    }
    assert!(holes_seen > 100);
}

#[test]
fn ring_of_tiles_traces_one_hole_around_the_center() {
    let mut g = TileGrid::new(5, 5);
    for t in g.clone().tiles() {
        let ring = (1..=3).contains(&t.x) && (1..=3).contains(&t.y) && t != Tile::new(2, 2);
        g.set(t, ring, ring, 0);
    }
    let (_, comps) = label_components(&g, |t| g.walkable(t));
    assert_eq!(comps.len(), 1);
    let pts = |v: &[(i64, i64)]| v.iter().map(|&(x, y)| Point::int(x, y)).collect::<Vec<_>>();
    assert_eq!(comps[0].outer_contour, pts(&[(1, 1), (4, 1), (4, 4), (1, 4)]));
    assert_eq!(comps[0].inner_contours, vec![pts(&[(3, 2), (2, 2), (2, 3), (3, 3)])]);
    assert_eq!(comps[0].tile_count, 8);
}

proptest! {
    #[test]
    fn labels_are_positive_exactly_on_walkable_tiles(seed in any::<u64>(), w in 1u32..20, h in 1u32..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_grid(&mut rng, w, h, 0.55);
        let (lg, comps) = label_components(&g, |t| g.walkable(t));
        prop_assert_eq!(lg.component_count as usize, comps.len());
        for t in g.tiles() {
            prop_assert_eq!(lg.label(t) > 0, g.walkable(t));
        }
    }
}
