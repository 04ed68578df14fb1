#pragma once

#include <stdexcept>
#include <string>

namespace primediff {

// Base of every library error. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotDivisible : public Error {
public:
    NotDivisible(const std::string& coefficient, const std::string& divisor)
        : Error("coefficient " + coefficient + " not divisible by " + divisor),
          coefficient_(coefficient), divisor_(divisor) {}

    const std::string& coefficient() const { return coefficient_; }
    const std::string& divisor() const { return divisor_; }

private:
    std::string coefficient_;
    std::string divisor_;
};

// Raised whenever an enumeration would exceed a configured cap.
class SearchCapExceeded : public Error {
public:
    using Error::Error;
};

class HypothesisFailed : public Error {
public:
    using Error::Error;
};

class InsufficientPrecision : public Error {
public:
    InsufficientPrecision(unsigned long p, const std::string& what)
        : Error("insufficient precision at p=" + std::to_string(p) + ": " + what), prime_(p) {}
    unsigned long prime() const { return prime_; }

private:
    unsigned long prime_;
};

class UnknownMultiplicity : public Error {
public:
    explicit UnknownMultiplicity(unsigned long p)
        : Error("multiplicity unknown at p=" + std::to_string(p)), prime_(p) {}
    unsigned long prime() const { return prime_; }

private:
    unsigned long prime_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace primediff
