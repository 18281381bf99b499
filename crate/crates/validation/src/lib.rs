//! Holds the `acceptance` test target, which exercises bayesorch end to end
//! and prints one PASS or FAIL line per criterion. It lives in its own
//! package so that a failing criterion does not stop the rest of the
//! workspace tests from running.
