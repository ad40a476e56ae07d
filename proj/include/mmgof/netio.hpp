#pragma once

// Directed binary networks and their file formats.
//
// Two text formats are supported, both 1-based on disk and 0-based in memory:
//   edge list  - one "i j" pair per line, whitespace separated;
//   dense CSV  - D rows of D comma separated 0/1 entries, no header.
// Emission is canonical (sorted edge list, "\n" line endings) so that
// parse(emit(Y)) == Y and emit(parse(emit(Y))) == emit(Y) byte for byte.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mmgof {

// An ordered node pair (from, to), from != to.
struct Dyad {
    std::uint32_t from = 0;
    std::uint32_t to = 0;

    friend bool operator==(const Dyad&, const Dyad&) = default;
};

// Off-diagonal dyads are numbered lexicographically by (from, to):
// index = from * (D - 1) + (to < from ? to : to - 1).
[[nodiscard]] std::size_t dyad_count(std::size_t nodes) noexcept;
[[nodiscard]] std::size_t dyad_index(std::size_t nodes, std::size_t from, std::size_t to);
[[nodiscard]] Dyad dyad_at(std::size_t nodes, std::size_t index);

class AdjacencyMatrix {
public:
    // All-zero network on `nodes` nodes; nodes must be >= 2.
    explicit AdjacencyMatrix(std::size_t nodes);

    [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t dyads() const noexcept { return dyad_count(nodes_); }

    [[nodiscard]] bool edge(std::size_t from, std::size_t to) const;
    void set_edge(std::size_t from, std::size_t to, bool present = true);

    [[nodiscard]] std::size_t edge_count() const noexcept;

    // Cell values over the off-diagonal dyads, in dyad order.
    [[nodiscard]] std::vector<std::uint32_t> dyad_table() const;

    friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

private:
    void check_cell(std::size_t from, std::size_t to) const;

    std::size_t nodes_;
    std::vector<std::uint8_t> cells_;  // row-major D x D, diagonal always 0
};

[[nodiscard]] AdjacencyMatrix parse_edge_list(std::string_view text, std::size_t nodes);
[[nodiscard]] AdjacencyMatrix parse_dense_csv(std::string_view text);

[[nodiscard]] std::string emit_edge_list(const AdjacencyMatrix& y);
[[nodiscard]] std::string emit_dense_csv(const AdjacencyMatrix& y);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Reads a network file, choosing the format by extension: ".csv" is dense,
// anything else is an edge list. Edge lists need `nodes`; when zero the
// largest id in the file is used.
[[nodiscard]] AdjacencyMatrix load_network(const std::filesystem::path& path, std::size_t nodes = 0);

// Directory holding bundled data assets. Honours the MMGOF_DATA_DIR
// environment variable, falling back to the path baked in at build time.
[[nodiscard]] std::filesystem::path data_directory();

[[nodiscard]] std::string sha256_hex(std::string_view bytes);

// Sampson's monastery liking network (third wave, top choices binarised,
// 18 nodes). The asset is verified against sampson/MANIFEST.json: the
// SHA-256 of the edge list, the node count and the deduplicated edge count
// must all agree, otherwise a DataIntegrity error is raised.
[[nodiscard]] AdjacencyMatrix load_sampson();
[[nodiscard]] AdjacencyMatrix load_sampson(const std::filesystem::path& data_dir);

// Node labels listed in the Sampson manifest, in node order.
[[nodiscard]] std::vector<std::string> sampson_labels();

}  // namespace mmgof
