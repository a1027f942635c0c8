#pragma once

// Named example diagrams, Reidemeister pairs, and seeded random Morse words.

#include <cstdint>
#include <cstdio>
#include <tuple>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "akh/diagram.hpp"

namespace akh {

struct CorpusItem {
  std::string name;
  AnnularDiagram diagram;
};

inline std::vector<CorpusItem> named_diagrams() {
  const std::vector<std::pair<std::string, std::string>> words = {
      {"trivial_unknot", "strands 0; cup 1; cap 1"},
      {"essential_unknot", "strands 1"},
      {"two_crossing_cube", "strands 3; x+ 2; x- 1"},
      {"kinked_strand", "strands 1; cup 1; x+ 2; x+ 2; cap 2"},
      {"two_essential", "strands 2"},
      {"hopf_closure", "strands 2; x+ 1; x+ 1"},
      {"trefoil_closure", "strands 2; x+ 1; x+ 1; x+ 1"},
      {"figure_eight_closure", "strands 3; x+ 1; x- 2; x+ 1; x- 2"},
      {"past_future_pair", "strands 2; x+ 1; x- 1"},
      {"contractible_hopf", "strands 0; cup 1; cup 3; x+ 2; x+ 2; cap 3; cap 1"},
      {"essential_beside_hopf", "strands 1; cup 2; cup 4; x+ 3; x+ 3; cap 4; cap 2"},
      {"mixed_orientation", "strands 2; orient + -; x+ 1; cap 1; cup 1; x- 1"},
      {"essential_beside_ladybug", "strands 1; cup 2; cup 4; x+ 3; x- 3; cap 4; cap 2"},
  };
  std::vector<CorpusItem> out;
  for (const auto& [name, word] : words) out.push_back({name, parse_morse_word(word)});
  return out;
}

struct ReidemeisterPair {
  std::string name;
  AnnularDiagram before, after;
};

/// Diagram pairs differing by one Reidemeister move away from the puncture.
inline std::vector<ReidemeisterPair> reidemeister_pairs() {
  const std::vector<std::tuple<std::string, std::string, std::string>> words = {
      {"R1 positive kink on an essential strand", "strands 1", "strands 1; cup 2; x+ 1; cap 2"},
      {"R1 negative kink below a strand", "strands 3; x+ 2; x- 1", "strands 3; x+ 2; x- 1; cup 3; x- 4; cap 3"},
      {"R1 kink on a trivial circle", "strands 0; cup 1; cap 1", "strands 0; cup 1; cup 3; x- 2; cap 1; cap 1"},
      {"R2 on two essential strands", "strands 2", "strands 2; x+ 1; x- 1"},
      {"R2 inside a braid closure", "strands 3; x+ 2; x- 1", "strands 3; x+ 2; x- 1; x+ 2; x- 2"},
      {"R3 positive braid relation", "strands 3; x+ 1; x+ 2; x+ 1", "strands 3; x+ 2; x+ 1; x+ 2"},
      {"R3 mixed braid relation", "strands 4; x- 1; x+ 2; x+ 1; x+ 3", "strands 4; x+ 2; x+ 1; x- 2; x+ 3"},
  };
  std::vector<ReidemeisterPair> out;
  for (const auto& [name, a, b] : words) out.push_back({name, parse_morse_word(a), parse_morse_word(b)});
  return out;
}

/// Seeded random words with between 1 and `max_crossings` crossings.  The
/// generator avoids std distributions so the output is identical on every
/// platform.
inline std::vector<CorpusItem> random_diagrams(int count, int max_crossings, std::uint64_t seed, int max_strands = 4) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  std::vector<CorpusItem> out;
  for (int t = 0; t < count; ++t) {
    const int target = uniform(1, max_crossings);
    const int k = uniform(0, 3);
    int strands = k, crossings = 0;
    std::vector<MorseEvent> events;
    while (crossings < target) {
      const int roll = uniform(0, 9);
      if (strands >= 2 && roll < 6) {
        events.push_back({uniform(0, 1) ? EventKind::CrossingPositive : EventKind::CrossingNegative, uniform(1, strands - 1)});
        ++crossings;
      } else if (strands + 2 <= max_strands && (roll < 8 || strands < 2)) {
        events.push_back({EventKind::Cup, uniform(1, strands + 1)});
        strands += 2;
      } else if (strands >= 2) {
        events.push_back({EventKind::Cap, uniform(1, strands - 1)});
        strands -= 2;
      }
    }
    while (strands > k) {
      events.push_back({EventKind::Cap, uniform(1, strands - 1)});
      strands -= 2;
    }
    while (strands < k) {
      events.push_back({EventKind::Cup, uniform(1, strands + 1)});
      strands += 2;
    }
    std::vector<int> orientation(k, 1);
    for (const auto& comp : AnnularDiagram::cut_components(k, events)) {
      const int flip = uniform(0, 1) ? 1 : -1;
      for (auto [pos, dir] : comp) orientation[pos] = flip * dir;
    }
    char name[32];
    std::snprintf(name, sizeof name, "random_%03d", t);
    out.push_back({name, AnnularDiagram(k, std::move(events), std::move(orientation))});
  }
  return out;
}

/// Named diagrams followed by `count` random words.
inline std::vector<CorpusItem> generate_corpus(int count, int max_crossings, std::uint64_t seed) {
  std::vector<CorpusItem> out = named_diagrams();
  for (auto& item : random_diagrams(count, max_crossings, seed)) out.push_back(std::move(item));
  return out;
}

/// Writes one .akh file per corpus item; returns the paths written.
inline std::vector<std::filesystem::path> write_corpus(const std::vector<CorpusItem>& items, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& item : items) {
    const auto path = dir / (item.name + ".akh");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# " << item.name << "\n" << item.diagram.to_text();
    paths.push_back(path);
  }
  return paths;
}

}  // namespace akh
