#pragma once

// Finite presentations of Bianchi groups and of their finite-index subgroups.
//
// A word is a vector of nonzero letters: +(k+1) stands for generator k and
// -(k+1) for its inverse.

#include <cstdint>
#include <string>
#include <vector>

#include "bianchi/congruence.hpp"
#include "bianchi/matrix.hpp"
#include "bianchi/sl2.hpp"

namespace bianchi {

using Word = std::vector<int>;

inline int letter_generator(int letter) { return (letter > 0 ? letter : -letter) - 1; }
inline int letter_sign(int letter) { return letter > 0 ? 1 : -1; }

Word inverse_word(const Word &w);
Word free_reduce(const Word &w);
/// Free and cyclic reduction.
Word cyclic_reduce(const Word &w);
Word concat(const Word &a, const Word &b);
Word word_power(const Word &w, long n);

struct GroupPresentation {
    FieldDescriptor field;
    std::vector<std::string> names;
    std::vector<Mat2> generators;
    std::vector<Word> relators;
    /// +1 or -1: each relator evaluates to sign * I in SL2.
    std::vector<int> signs;
    /// True for a presentation of PSL2 (signs may be -1), false for SL2 (all signs +1).
    bool projective = true;
    std::string source;
    /// Generators equal to [[1,1],[0,1]] and [[1,w],[0,1]], or -1 when absent.
    int t_index = -1;
    int u_index = -1;

    std::size_t generator_count() const { return generators.size(); }
};

Mat2 evaluate(const FieldDescriptor &F, const std::vector<Mat2> &generators, const Word &w);
std::string format_word(const GroupPresentation &P, const Word &w);
Word parse_word(const GroupPresentation &P, const std::string &text);

/// Parses the plain-text format: 'field D', 'gen NAME a,b;c,d', 'rel WORD'.
/// Relators are verified by exact evaluation.
GroupPresentation parse_presentation(const std::string &text, const std::string &source);
/// Reads data/presentations/D<n>.txt (directory overridable with BIANCHI_DATA).
GroupPresentation load_presentation(std::int64_t D);
std::string presentation_directory();

/// SL2 presentation obtained from a PSL2 one by adjoining z = a^2 = -I:
/// relators r z^{-1} for sign -1, a^4 and [a^2, g] for every generator g.
GroupPresentation sl2_presentation(const GroupPresentation &psl);

/// Exponent-sum matrix (relators x generators); its cokernel is the abelianization.
IntMatrix exponent_sum_matrix(std::size_t generators, const std::vector<Word> &relators);

/// Right action of the presentation generators on cosets of a subgroup of G.
struct CosetTable {
    std::size_t cosets = 0;
    std::size_t generators = 0;
    std::vector<std::uint32_t> forward;  // forward[c * generators + x] = c x
    std::vector<std::uint32_t> backward; // backward[c * generators + x] = c x^-1
    std::vector<MatMod> representatives;
    std::vector<std::int64_t> parent;    // BFS tree: parent coset, -1 for the base coset
    std::vector<int> parent_letter;      // letter taking parent to this coset
    bool projective = false;

    std::uint32_t act(std::uint32_t c, int letter) const
    {
        int x = letter_generator(letter);
        return letter > 0 ? forward[c * generators + x] : backward[c * generators + x];
    }
    std::uint32_t act(std::uint32_t c, const Word &w) const
    {
        for (int l : w)
            c = act(c, l);
        return c;
    }
    /// Word w with (base coset) w = c.
    Word transversal(std::uint32_t c) const;
};

CosetTable build_coset_table(const GroupPresentation &P, const CosetSpace &space);

/// Chooses the coset model for a subgroup: PSL2 cosets and the PSL2
/// presentation when -I is not in the image subgroup, SL2 otherwise.
struct SubgroupModel {
    GroupPresentation presentation;
    CosetSpace space;
    CosetTable table;
};

SubgroupModel make_subgroup_model(const GroupPresentation &psl, const SubgroupSpec &spec);

struct TietzeStats {
    std::size_t generators_before = 0;
    std::size_t relators_before = 0;
    std::size_t generators_after = 0;
    std::size_t relators_after = 0;
    std::size_t total_length_after = 0;
    int passes = 0;
};

/// Reidemeister-Schreier presentation of the subgroup, optionally simplified.
struct SubgroupPresentation {
    std::size_t index = 0;
    std::size_t parent_generators = 0;
    std::size_t schreier_count = 0; // index * (gens - 1) + 1
    /// Remaining generators as words in the parent generators, and as matrices.
    std::vector<Word> generator_words;
    std::vector<Mat2> generator_matrices;
    std::vector<Word> relators;     // over the remaining generators
    /// Schreier generator ids (0-based over the non-tree pairs) that survive.
    std::vector<std::size_t> remaining;
    /// Tietze eliminations in order: (Schreier id, value as a word in the
    /// Schreier ids alive at that moment, letters +-(id+1)).
    std::vector<std::pair<std::size_t, Word>> eliminations;
    TietzeStats stats;
};

struct TietzeOptions {
    int max_passes = 12;
    std::size_t max_relator_length = 2000;
};

SubgroupPresentation subgroup_presentation(const SubgroupModel &model, bool simplify = true,
                                           const TietzeOptions &options = {});

/// Rewrites a word of the parent group lying in the subgroup as a word in the
/// remaining generators of S.
Word rewrite_in_subgroup(const SubgroupModel &model, const SubgroupPresentation &S, const Word &w);

} // namespace bianchi
