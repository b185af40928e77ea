use conormal_cli::parse_variety;
use conormal_core::varieties::{Constructor, Realization};

fn c(text: &str) -> Constructor {
    parse_variety(text, 0).unwrap().constructor
}

#[test]
fn positional_constructors() {
    assert_eq!(c("veronese:2,3"), Constructor::Veronese { n: 2, r: 3 });
    assert_eq!(c("segre:1,2"), Constructor::Segre { n: 1, m: 2 });
    assert_eq!(c("scroll:2,1"), Constructor::Scroll { e: vec![2, 1] });
    assert_eq!(c("ci:4,2,2,2"), Constructor::CompleteIntersection { n: 4, degrees: vec![2, 2, 2] });
    assert_eq!(c("complete-intersection:3,2,3"), c("ci:3,2,3"));
    assert_eq!(c("plane-canonical:7"), Constructor::PlaneCanonical { d: 7 });
    assert_eq!(c("plane-extension:7"), Constructor::PlaneExtension { d: 7 });
    assert_eq!(c(" veronese: 1 , 4 "), Constructor::Veronese { n: 1, r: 4 });
}

#[test]
fn keyword_values_continue_over_tokens() {
    assert_eq!(c("tetragonal:2,2,1,b=1,2"), Constructor::Tetragonal { e: [2, 2, 1], b: [1, 2] });
    assert_eq!(
        c("pentagonal:2,1,1,1,b=1,2,2,2,2"),
        Constructor::Pentagonal { e: [2, 1, 1, 1], b: [1, 2, 2, 2, 2] }
    );
    assert!(matches!(c("pentagonal:g=8"), Constructor::Pentagonal { .. }));
}

#[test]
fn grassmannian_realizations() {
    assert_eq!(c("g25"), Constructor::Grassmannian { realization: Realization::Points });
    assert_eq!(c("g25,realization=symbolic"), Constructor::Grassmannian { realization: Realization::Symbolic });
    assert_eq!(c("points5"), Constructor::GorensteinPoints);
}

#[test]
fn seed_is_recorded() {
    assert_eq!(parse_variety("ci:3,2,3", 17).unwrap().seed, 17);
}

#[test]
fn malformed_specs_are_errors() {
    for bad in [
        "",
        "torus:1",
        "veronese:1",
        "veronese:1,2,3",
        "veronese:1,x",
        "veronese:1,2,seed=3",
        "veronese:-1,2",
        "tetragonal:2,2,1",
        "tetragonal:2,2,b=1,2",
        "tetragonal:2,2,1,b=1,2,3",
        "tetragonal:2,2,1,b=1,b=2",
        "pentagonal:g=12",
        "pentagonal:1,1,1,1,g=8",
        "pentagonal:g=8,b=1,1,1,1,2",
        "g25,realization=cells",
        "g25:3",
        "points5:1",
        "ci:3",
    ] {
        assert!(parse_variety(bad, 0).is_err(), "`{bad}` should be rejected");
    }
}
