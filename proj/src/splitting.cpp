#include "coarsekit/splitting.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace coarsekit {

int Presentation::max_relator_length() const {
    std::size_t best = 0;
    for (const auto& r : relators) best = std::max(best, r.size());
    return static_cast<int>(best);
}

int Presentation::letter_index(const std::string& label) const {
    for (std::size_t i = 0; i < letters.size(); ++i)
        if (letters[i] == label) return static_cast<int>(i);
    return -1;
}

void Presentation::validate() const {
    std::set<std::string> seen;
    for (const auto& l : letters) {
        if (l.empty()) throw InvalidInput("empty letter label");
        if (!seen.insert(l).second) throw LetterClash("duplicate letter '" + l + "'");
    }
    const int n = static_cast<int>(letters.size());
    for (const auto& r : relators) {
        for (int s : r)
            if (s == 0 || std::abs(s) > n) throw InvalidInput("relator letter out of range");
        if (free_reduce(r) != r) throw InvalidInput("relators must be freely reduced");
    }
    if (oracle && letter_images.size() != letters.size())
        throw InvalidInput("evaluation must cover every letter");
}

Word free_reduce(Word w) {
    Word out;
    for (int s : w) {
        if (!out.empty() && out.back() == -s)
            out.pop_back();
        else
            out.push_back(s);
    }
    return out;
}

Word word_inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (int& s : out) s = -s;
    return out;
}

Elem Presentation::evaluate(const Word& word) const {
    if (!oracle) throw NoEvaluation("presentation has no evaluation");
    Elem acc = oracle->identity();
    for (int s : word) {
        const Elem& img = letter_images[std::abs(s) - 1];
        acc = oracle->multiply(acc, s > 0 ? img : oracle->inverse(img));
    }
    return acc;
}

RelatorCheck relators_hold(const Presentation& p) {
    if (!p.has_evaluation()) throw NoEvaluation("presentation has no evaluation");
    const std::string id_key = p.oracle->key(p.oracle->identity());
    for (std::size_t i = 0; i < p.relators.size(); ++i)
        if (p.oracle->key(p.evaluate(p.relators[i])) != id_key)
            return RelatorCheck{false, static_cast<int>(i)};
    return RelatorCheck{true, -1};
}

Presentation steinberg_presentation(int n) {
    if (n < 3) throw BadN("Steinberg presentation needs n >= 3");
    OraclePtr oracle = make_oracle("slnz:" + std::to_string(n));

    Presentation p;
    p.oracle = oracle;
    std::map<std::pair<int, int>, int> letter_of;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            if (i == j) continue;
            letter_of[{i, j}] = static_cast<int>(p.letters.size());
            const std::string label = "e" + std::to_string(i) + std::to_string(j);
            p.letters.push_back(label);
            const int gi = oracle->generator_index(label);
            p.letter_images.push_back(oracle->generators()[gi].elem);
        }
    auto L = [&](int i, int j) { return letter_of.at({i, j}) + 1; };  // 1-based

    // [e_ij, e_jk] = e_ik for distinct i, j, k.
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                if (i == j || j == k || i == k) continue;
                p.relators.push_back(
                    free_reduce({L(i, j), L(j, k), -L(i, j), -L(j, k), -L(i, k)}));
            }
    // [e_ij, e_kl] = 1 when i != l and k != j (unordered pairs once).
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> done;
    for (const auto& [ij, a] : letter_of)
        for (const auto& [kl, b] : letter_of) {
            (void)a;
            (void)b;
            if (ij == kl) continue;
            const auto key = ij < kl ? std::make_pair(ij, kl) : std::make_pair(kl, ij);
            if (done.count(key)) continue;
            const auto [i, j] = ij;
            const auto [k, l] = kl;
            if (i == l || k == j) continue;
            done.insert(key);
            p.relators.push_back(
                free_reduce({L(i, j), L(k, l), -L(i, j), -L(k, l)}));
        }
    // (e_12 e_21^-1 e_12)^4 = 1.
    Word w;
    for (int rep = 0; rep < 4; ++rep) {
        w.push_back(L(1, 2));
        w.push_back(-L(2, 1));
        w.push_back(L(1, 2));
    }
    p.relators.push_back(free_reduce(w));
    p.validate();
    return p;
}

Presentation defining_subset_presentation(const Presentation& p, Budget& budget) {
    p.validate();
    if (!p.has_evaluation()) throw NoEvaluation("transform needs an evaluation");
    const int n = p.max_relator_length();
    const int m = (n + 2) / 3 < 1 ? 1 : (n + 2) / 3;

    // Generators for the ball: letter images and their inverses.
    std::vector<Generator> gens;
    for (std::size_t i = 0; i < p.letters.size(); ++i) {
        gens.push_back({p.letters[i], p.letter_images[i]});
        gens.push_back({p.letters[i] + "'", p.oracle->inverse(p.letter_images[i])});
    }
    BallTable ball(p.oracle, gens);
    ball.extend_to(m, budget);

    Presentation out;
    out.oracle = p.oracle;
    std::unordered_map<std::string, int> letter_of_key;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        letter_of_key.emplace(ball.key_at(i), static_cast<int>(i));
        out.letters.push_back("g" + std::to_string(i));
        out.letter_images.push_back(ball.elem_at(i));
    }
    const auto letter_of = [&](const Elem& e) -> int {
        auto it = letter_of_key.find(p.oracle->key(e));
        if (it == letter_of_key.end()) return -1;
        return it->second + 1;  // 1-based
    };

    // Ball-multiplication relators: w s = (ws) for w in S^(m-1), s in S^1.
    std::set<Word> relators;
    for (std::size_t wi = 0; wi < ball.size(); ++wi) {
        if (ball.entry_at(wi).len > m - 1) continue;
        for (std::size_t si = 0; si < ball.size(); ++si) {
            if (ball.entry_at(si).len > 1) continue;
            budget.charge(1);
            const Elem prod = p.oracle->multiply(ball.elem_at(wi), ball.elem_at(si));
            const int wl = static_cast<int>(wi) + 1;
            const int sl = static_cast<int>(si) + 1;
            const int pl = letter_of(prod);
            if (pl < 0) throw InvalidInput("ball product escaped the enumerated ball");
            relators.insert(free_reduce({wl, sl, -pl}));
        }
    }
    // Original relators split into at most three ball letters.
    for (const auto& r : p.relators) {
        Word rewritten;
        const int len = static_cast<int>(r.size());
        for (int from = 0; from < len; from += m) {
            const int to = std::min(from + m, len);
            Elem seg = p.oracle->identity();
            for (int i = from; i < to; ++i) {
                const Elem& img = p.letter_images[std::abs(r[i]) - 1];
                seg = p.oracle->multiply(seg, r[i] > 0 ? img : p.oracle->inverse(img));
            }
            const int sl = letter_of(seg);
            if (sl < 0) throw InvalidInput("relator segment escaped the enumerated ball");
            rewritten.push_back(sl);
        }
        relators.insert(free_reduce(rewritten));
    }
    for (auto& r : relators)
        if (!r.empty()) out.relators.push_back(r);
    out.validate();
    return out;
}

namespace {

void check_letter_fresh(const Presentation& p, const std::string& label) {
    if (p.letter_index(label) >= 0)
        throw LetterClash("letter '" + label + "' already present");
}

}  // namespace

Presentation hnn_presentation(const Presentation& base, const std::vector<std::string>& k_letters,
                              const std::map<std::string, Word>& phi,
                              const std::string& stable_letter) {
    base.validate();
    check_letter_fresh(base, stable_letter);
    Presentation out;
    out.letters = base.letters;
    out.relators = base.relators;
    out.letters.push_back(stable_letter);
    const int t = static_cast<int>(out.letters.size());  // 1-based index of t
    for (const auto& k : k_letters) {
        const int ki = base.letter_index(k);
        if (ki < 0) throw InvalidInput("K letter '" + k + "' not in base alphabet");
        auto it = phi.find(k);
        if (it == phi.end()) throw InvalidInput("phi undefined on letter '" + k + "'");
        // t k t^-1 phi(k)^-1
        Word r{t, ki + 1, -t};
        const Word inv = word_inverse(it->second);
        r.insert(r.end(), inv.begin(), inv.end());
        out.relators.push_back(free_reduce(r));
    }
    // No evaluation: the extension generally leaves the base oracle.
    out.validate();
    return out;
}

Presentation amalgam_presentation(const Presentation& a, const Presentation& b,
                                  const std::vector<std::string>& c_letters,
                                  const std::map<std::string, Word>& phi) {
    a.validate();
    b.validate();
    Presentation out;
    out.letters = a.letters;
    for (const auto& l : b.letters) {
        check_letter_fresh(out, l);
        out.letters.push_back(l);
    }
    out.relators = a.relators;
    const int offset = static_cast<int>(a.letters.size());
    for (const auto& r : b.relators) {
        Word shifted;
        for (int s : r) shifted.push_back(s > 0 ? s + offset : s - offset);
        out.relators.push_back(shifted);
    }
    for (const auto& c : c_letters) {
        const int ci = a.letter_index(c);
        if (ci < 0) throw InvalidInput("C letter '" + c + "' not in the first alphabet");
        auto it = phi.find(c);
        if (it == phi.end()) throw InvalidInput("phi undefined on letter '" + c + "'");
        Word r{ci + 1};
        // phi(c) is a word over b's alphabet.
        for (int s : word_inverse(it->second))
            r.push_back(s > 0 ? s + offset : s - offset);
        out.relators.push_back(free_reduce(r));
    }
    out.validate();
    return out;
}

bool letters_generate_oracle(const Presentation& p) {
    if (!p.has_evaluation()) throw NoEvaluation("presentation has no evaluation");
    const auto order = table_order(*p.oracle);
    if (!order) throw BadParams("closure check is defined for finite table oracles only");
    std::unordered_set<std::string> seen;
    std::vector<Elem> frontier;
    seen.insert(p.oracle->key(p.oracle->identity()));
    frontier.push_back(p.oracle->identity());
    while (!frontier.empty()) {
        std::vector<Elem> next;
        for (const Elem& g : frontier)
            for (const Elem& img : p.letter_images)
                for (const Elem& h : {p.oracle->multiply(g, img),
                                      p.oracle->multiply(g, p.oracle->inverse(img))}) {
                    if (seen.insert(p.oracle->key(h)).second) next.push_back(h);
                }
        frontier = std::move(next);
    }
    return seen.size() == *order;
}

// ---- arithmetic classifiers -------------------------------------------------------

ValuationVector make_valuation(const Rational& lambda, std::vector<long long> primes) {
    if (lambda == 0) throw BadParams("lambda must be nonzero");
    std::set<long long> distinct(primes.begin(), primes.end());
    if (distinct.size() != primes.size()) throw BadParams("primes must be distinct");
    for (long long p : primes) {
        if (p < 2) throw BadParams("invalid prime");
        for (long long d = 2; d * d <= p; ++d)
            if (p % d == 0) throw BadParams(std::to_string(p) + " is not prime");
    }
    ValuationVector v;
    v.lambda = lambda;
    v.primes = std::move(primes);
    BigInt num = boost::multiprecision::numerator(lambda);
    BigInt den = boost::multiprecision::denominator(lambda);
    if (num < 0) num = -num;
    for (long long p : v.primes) {
        long long val = 0;
        while (num % p == 0) {
            num /= p;
            ++val;
        }
        while (den % p == 0) {
            den /= p;
            --val;
        }
        v.vals.push_back(val);
    }
    v.residual = num != 1 || den != 1;
    return v;
}

bool engulfs(const ValuationVector& v) {
    if (v.residual) throw NotAUnit("lambda is not a unit of Z[1/prod(primes)]");
    // sigma(Z) inside Z needs lambda integral; exhausting Z[1/prod(primes)]
    // needs every chosen prime to divide lambda.
    const bool integral = boost::multiprecision::denominator(v.lambda) == 1;
    if (!integral) return false;
    for (long long val : v.vals)
        if (val < 1) return false;
    return true;
}

std::string to_string(GammaClass c) {
    switch (c) {
        case GammaClass::NotFinitelyGenerated: return "not_finitely_generated";
        case GammaClass::FGNotFP: return "finitely_generated_not_finitely_presented";
        case GammaClass::FinitelyPresented: return "finitely_presented";
    }
    return "?";
}

GammaClass classify_gamma_lambda(const ValuationVector& v) {
    if (v.residual) throw NotAUnit("lambda is not a unit of Z[1/prod(primes)]");
    if (v.primes.empty()) throw BadParams("prime set must be nonempty");
    bool any_zero = false, all_pos = true, all_neg = true;
    for (long long val : v.vals) {
        if (val == 0) any_zero = true;
        if (val <= 0) all_pos = false;
        if (val >= 0) all_neg = false;
    }
    if (any_zero) return GammaClass::NotFinitelyGenerated;
    if (all_pos || all_neg) return GammaClass::FinitelyPresented;
    return GammaClass::FGNotFP;
}

bool HomFactor::is_zero() const {
    return std::all_of(direction.begin(), direction.end(),
                       [](const Rational& q) { return q == 0; });
}

bool zero_in_segment(const HomFactor& w1, const HomFactor& w2) {
    if (w1.direction.size() != w2.direction.size())
        throw DimensionMismatch("direction vectors have different lengths");
    if (w1.is_zero() || w2.is_zero()) return true;
    // 0 in [w1, w2] iff w2 = -t w1 for some rational t > 0; the positive scale
    // tags absorb any positive real factor.
    Rational t;
    bool have_t = false;
    for (std::size_t i = 0; i < w1.direction.size(); ++i) {
        const Rational& a = w1.direction[i];
        const Rational& b = w2.direction[i];
        if (a == 0 && b == 0) continue;
        if (a == 0 || b == 0) return false;
        const Rational ratio = -b / a;
        if (!have_t) {
            t = ratio;
            have_t = true;
        } else if (t != ratio) {
            return false;
        }
    }
    return have_t && t > 0;
}

std::string to_string(SemidirectClass c) {
    switch (c) {
        case SemidirectClass::NotCompactlyGenerated: return "not_compactly_generated";
        case SemidirectClass::CGNotCP: return "compactly_generated_not_compactly_presented";
        case SemidirectClass::CompactlyPresented: return "compactly_presented";
    }
    return "?";
}

SemidirectClass classify_semidirect(const std::vector<HomFactor>& factors) {
    if (factors.empty()) throw BadParams("need at least one factor");
    for (const auto& w : factors)
        if (w.is_zero()) return SemidirectClass::NotCompactlyGenerated;
    for (std::size_t i = 0; i < factors.size(); ++i)
        for (std::size_t j = i + 1; j < factors.size(); ++j)
            if (zero_in_segment(factors[i], factors[j])) return SemidirectClass::CGNotCP;
    return SemidirectClass::CompactlyPresented;
}

std::vector<HomFactor> hom_factors_of_valuation(const ValuationVector& v) {
    std::vector<HomFactor> out;
    for (std::size_t i = 0; i < v.primes.size(); ++i) {
        HomFactor w;
        w.base = v.primes[i];
        w.direction = {Rational(-v.vals[i])};
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace coarsekit
