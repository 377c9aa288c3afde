//! The artwork tables of the running example: a query, two unionable tables,
//! their outer union, and a diluted variant of the first table.

use crate::table::Table;

const QUERY_SCHEMA: [&str; 5] = ["Artwork", "Artist", "Date Created", "Medium", "Style"];
const T1_SCHEMA: [&str; 6] = [
    "Artwork",
    "Artist",
    "Date Created",
    "Medium",
    "Style",
    "Condition",
];

pub fn query() -> Table {
    Table::from_strs(
        "Q",
        &QUERY_SCHEMA,
        &[
            &["The Mona Lisa", "Leonardo da Vinci", "1503–1506", "Oil on poplar panel", "High Renaissance"],
            &["The Hay Wain", "John Constable", "1821", "Oil on canvas", "Romanticism"],
            &["The Burial at Ornans", "Gustave Courbet", "1849–1850", "Oil on canvas", "Early Netherlandish"],
        ],
    )
    .expect("static fixture")
}

pub fn t1() -> Table {
    Table::from_strs(
        "T1",
        &T1_SCHEMA,
        &[
            &["Water Lilies", "Claude Monet", "1897–1926", "Oil on canvas", "Nature", "Good"],
            &["The Swing", "Jean-Honoré Fragonard", "1767", "Oil on canvas", "Figurative", "Excellent"],
            &["The Fighting Temeraire", "J.M.W. Turner", "1839", "Oil on canvas", "Historical", "Good"],
        ],
    )
    .expect("static fixture")
}

pub fn t2() -> Table {
    Table::from_strs(
        "T2",
        &["Artwork", "Artist", "Subject Matter", "Cultural Context"],
        &[
            &["Mona Lisa", "Leonardo da Vinci", "Portrait of Lisa Gherardini", "General ... on later portraiture"],
            &["The Persistence of Memory", "Salvador Dalí", "Melting clocks", "Permanent collection ... New York"],
            &["The Persistence of Memory", "Salvador Dalí", "Melting clocks", "Museum of Modern Art, New York"],
        ],
    )
    .expect("static fixture")
}

/// `Q ⩁ T2` under name-based alignment.
pub fn figure_outer_union() -> Table {
    Table::from_strs(
        "Q",
        &QUERY_SCHEMA,
        &[
            &["The Mona Lisa", "Leonardo da Vinci", "1503–1506", "Oil on poplar panel", "High Renaissance"],
            &["The Hay Wain", "John Constable", "1821", "Oil on canvas", "Romanticism"],
            &["The Burial at Ornans", "Gustave Courbet", "1849–1850", "Oil on canvas", "Early Netherlandish"],
            &["Mona Lisa", "Leonardo da Vinci", "", "", ""],
            &["The Persistence of Memory", "Salvador Dalí", "", "", ""],
            &["The Persistence of Memory", "Salvador Dalí", "", "", ""],
        ],
    )
    .expect("static fixture")
}

/// `T1` diluted with the third query tuple.
pub fn t1_diluted() -> Table {
    Table::from_strs(
        "T1",
        &T1_SCHEMA,
        &[
            &["Water Lilies", "Claude Monet", "1897–1926", "Oil on canvas", "Nature", "Good"],
            &["The Swing", "Jean-Honoré Fragonard", "1767", "Oil on canvas", "Figurative", "Excellent"],
            &["The Fighting Temeraire", "J.M.W. Turner", "1839", "Oil on canvas", "Historical", "Good"],
            &["The Burial at Ornans", "Gustave Courbet", "1849–1850", "Oil on canvas", "Early Netherlandish", ""],
        ],
    )
    .expect("static fixture")
}
