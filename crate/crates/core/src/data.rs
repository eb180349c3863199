//! Bundled group definitions.

pub const MATRIX_GROUPS: [(&str, &str); 4] = [
    ("weeks", include_str!("../data/weeks.json")),
    ("z", include_str!("../data/z.json")),
    ("z2", include_str!("../data/z2.json")),
    ("c3", include_str!("../data/c3.json")),
];

pub const CRYSTAL_GROUPS: [(&str, &str); 3] = [
    ("promislow", include_str!("../data/promislow.json")),
    ("z3", include_str!("../data/z3_lattice.json")),
    ("klein-bottle", include_str!("../data/klein_bottle.json")),
];

pub const FINITE_GROUPS: [(&str, &str); 5] = [
    ("z2xz2", include_str!("../data/groups/z2xz2.json")),
    ("z6", include_str!("../data/groups/z6.json")),
    ("s3", include_str!("../data/groups/s3.json")),
    ("d8", include_str!("../data/groups/d8.json")),
    ("a5", include_str!("../data/groups/a5.json")),
];

pub const APPENDIX_TREE: &str = include_str!("../data/appendix_tree.json");

fn find(table: &[(&str, &'static str)], name: &str) -> Option<&'static str> {
    table.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn matrix_group(name: &str) -> Option<&'static str> {
    find(&MATRIX_GROUPS, name)
}

pub fn crystal_group(name: &str) -> Option<&'static str> {
    find(&CRYSTAL_GROUPS, name)
}

pub fn finite_group(name: &str) -> Option<&'static str> {
    find(&FINITE_GROUPS, name)
}

/// Any bundled JSON document by name.
pub fn any(name: &str) -> Option<&'static str> {
    matrix_group(name).or_else(|| crystal_group(name)).or_else(|| finite_group(name)).or_else(|| {
        (name == "appendix-tree").then_some(APPENDIX_TREE)
    })
}

pub fn names() -> Vec<&'static str> {
    MATRIX_GROUPS
        .iter()
        .chain(&CRYSTAL_GROUPS)
        .chain(&FINITE_GROUPS)
        .map(|(n, _)| *n)
        .chain(["appendix-tree"])
        .collect()
}
