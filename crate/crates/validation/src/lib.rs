//! Holds the `acceptance` test target, which checks every acceptance
//! criterion of `cone-resonances` and prints one PASS/FAIL line for each.
