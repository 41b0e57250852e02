#ifndef COARSEKIT_SPLITTING_HPP
#define COARSEKIT_SPLITTING_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/errors.hpp"
#include "coarsekit/group_oracles.hpp"
#include "coarsekit/rational.hpp"

namespace coarsekit {

/// A word over presentation letters: signed 1-based letter indices, negative
/// for formal inverses, freely reduced.
using Word = std::vector<int>;

/// Abstract alphabet plus relators, optionally evaluable into a group oracle.
/// The HNN convention used throughout is t k t^-1 = phi(k).
struct Presentation {
    std::vector<std::string> letters;
    std::vector<Word> relators;
    std::string convention = "tkt^-1=phi(k)";

    OraclePtr oracle;                 // optional evaluation target
    std::vector<Elem> letter_images;  // per letter, when oracle is set

    bool has_evaluation() const { return oracle != nullptr; }
    int max_relator_length() const;
    int letter_index(const std::string& label) const;  // -1 when absent
    void validate() const;
    Elem evaluate(const Word& word) const;
};

Word free_reduce(Word w);
Word word_inverse(const Word& w);

struct RelatorCheck {
    bool ok = true;
    int failing_relator = -1;
};

/// Evaluates every relator; reports the first that misses the identity.
RelatorCheck relators_hold(const Presentation& p);

/// The bounded presentation of SL_n(Z) on elementary matrices, evaluated into
/// the slnz oracle. Relators have length at most 12.
Presentation steinberg_presentation(int n);

/// Rewrites a bounded presentation over the ball S^m, m = floor((n+2)/3):
/// length-3 ball-multiplication relators plus three-way splits of the
/// original relators. Requires an evaluation.
Presentation defining_subset_presentation(const Presentation& p, Budget& budget);

/// HNN extension with a fresh stable letter and relators t k t^-1 phi(k)^-1.
Presentation hnn_presentation(const Presentation& base, const std::vector<std::string>& k_letters,
                              const std::map<std::string, Word>& phi,
                              const std::string& stable_letter = "t");

/// Amalgam over identified letters: relators c phi(c)^-1 on the disjoint union.
Presentation amalgam_presentation(const Presentation& a, const Presentation& b,
                                  const std::vector<std::string>& c_letters,
                                  const std::map<std::string, Word>& phi);

/// For finite table oracles: the subgroup generated by the letters has the
/// full group order (soundness companion to relators_hold).
bool letters_generate_oracle(const Presentation& p);

// --- arithmetic classifiers -----------------------------------------------------

/// A nonzero rational with its valuations at a chosen finite set of primes.
struct ValuationVector {
    Rational lambda{1};
    std::vector<long long> primes;
    std::vector<long long> vals;  // v_p(lambda) per prime
    bool residual = false;        // lambda has a prime factor outside `primes`
};

ValuationVector make_valuation(const Rational& lambda, std::vector<long long> primes);

/// Multiplication by lambda engulfs Z[1/prod(primes)] into Z exactly when
/// lambda is an integer with positive valuation at every chosen prime.
/// Requires lambda to be a unit of Z[1/prod(primes)].
bool engulfs(const ValuationVector& v);

enum class GammaClass { NotFinitelyGenerated, FGNotFP, FinitelyPresented };
std::string to_string(GammaClass c);

/// Finiteness class of Z[1/p1...pn] x|_lambda Z.
GammaClass classify_gamma_lambda(const ValuationVector& v);

/// One factor of a semidirect-product datum: a rational direction vector over
/// the generators of A = Z^d, with the positive scale (log of the residue
/// base) left implicit.
struct HomFactor {
    std::vector<Rational> direction;
    long long base = 2;  // informational tag

    bool is_zero() const;
};

/// True iff the straight segment between the two functionals passes through
/// zero: one endpoint vanishes or the directions are negatively proportional.
bool zero_in_segment(const HomFactor& w1, const HomFactor& w2);

enum class SemidirectClass { NotCompactlyGenerated, CGNotCP, CompactlyPresented };
std::string to_string(SemidirectClass c);

SemidirectClass classify_semidirect(const std::vector<HomFactor>& factors);

/// The functionals induced by a valuation vector on A = Z: w_j = -v_{p_j}.
std::vector<HomFactor> hom_factors_of_valuation(const ValuationVector& v);

}  // namespace coarsekit

#endif
