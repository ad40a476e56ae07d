#include "mmgof/netio.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mmgof/error.hpp"

#ifndef MMGOF_DATA_DIR
#define MMGOF_DATA_DIR "data"
#endif

namespace mmgof {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits on '\n'. A single trailing newline does not produce an extra line.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

bool parse_uint(std::string_view token, std::size_t& out) {
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end && !token.empty();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

}  // namespace

std::size_t dyad_count(std::size_t nodes) noexcept { return nodes * (nodes - 1); }

std::size_t dyad_index(std::size_t nodes, std::size_t from, std::size_t to) {
    if (from >= nodes || to >= nodes || from == to)
        fail(ErrorKind::Domain, "no dyad (" + std::to_string(from) + "," + std::to_string(to) + ")");
    return from * (nodes - 1) + (to < from ? to : to - 1);
}

Dyad dyad_at(std::size_t nodes, std::size_t index) {
    if (index >= dyad_count(nodes)) fail(ErrorKind::Domain, "dyad index out of range");
    const auto from = index / (nodes - 1);
    auto to = index % (nodes - 1);
    if (to >= from) ++to;
    return {static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(to)};
}

AdjacencyMatrix::AdjacencyMatrix(std::size_t nodes) : nodes_(nodes) {
    if (nodes < 2) fail(ErrorKind::Domain, "a network needs at least 2 nodes");
    cells_.assign(nodes * nodes, 0);
}

void AdjacencyMatrix::check_cell(std::size_t from, std::size_t to) const {
    if (from >= nodes_ || to >= nodes_) fail(ErrorKind::Domain, "node id out of range");
}

bool AdjacencyMatrix::edge(std::size_t from, std::size_t to) const {
    check_cell(from, to);
    return cells_[from * nodes_ + to] != 0;
}

void AdjacencyMatrix::set_edge(std::size_t from, std::size_t to, bool present) {
    check_cell(from, to);
    if (from == to) fail(ErrorKind::SelfLoop, "diagonal cell (" + std::to_string(from + 1) + ")");
    cells_[from * nodes_ + to] = present ? 1 : 0;
}

std::size_t AdjacencyMatrix::edge_count() const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

std::vector<std::uint32_t> AdjacencyMatrix::dyad_table() const {
    std::vector<std::uint32_t> table;
    table.reserve(dyads());
    for (std::size_t i = 0; i < nodes_; ++i)
        for (std::size_t j = 0; j < nodes_; ++j)
            if (i != j) table.push_back(cells_[i * nodes_ + j]);
    return table;
}

AdjacencyMatrix parse_edge_list(std::string_view text, std::size_t nodes) {
    AdjacencyMatrix y(nodes);
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const auto line = trim(lines[n]);
        if (line.empty()) continue;
        const auto where = "line " + std::to_string(n + 1);
        const auto tokens = split_ws(line);
        std::size_t from = 0, to = 0;
        if (tokens.size() != 2 || !parse_uint(tokens[0], from) || !parse_uint(tokens[1], to))
            fail(ErrorKind::MalformedInput, where + ": expected \"i j\"");
        if (from < 1 || from > nodes || to < 1 || to > nodes)
            fail(ErrorKind::MalformedInput,
                 where + ": node id out of range [1, " + std::to_string(nodes) + "]");
        if (from == to) fail(ErrorKind::SelfLoop, where + ": self-loop on node " + std::to_string(from));
        y.set_edge(from - 1, to - 1);
    }
    return y;
}

AdjacencyMatrix parse_dense_csv(std::string_view text) {
    std::vector<std::vector<std::uint8_t>> rows;
    for (auto line : split_lines(text)) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::uint8_t> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto cell = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
            if (cell != "0" && cell != "1")
                fail(ErrorKind::Value, "row " + std::to_string(rows.size() + 1) + ": entry '" +
                                           std::string(cell) + "' is not 0 or 1");
            row.push_back(cell == "1" ? 1 : 0);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    const auto d = rows.size();
    if (d < 2) fail(ErrorKind::Shape, "dense matrix must have at least 2 rows");
    for (std::size_t i = 0; i < d; ++i)
        if (rows[i].size() != d)
            fail(ErrorKind::Shape, "row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                       " entries, expected " + std::to_string(d));
    AdjacencyMatrix y(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (rows[i][i] != 0) fail(ErrorKind::SelfLoop, "nonzero diagonal at row " + std::to_string(i + 1));
        for (std::size_t j = 0; j < d; ++j)
            if (i != j && rows[i][j]) y.set_edge(i, j);
    }
    return y;
}

std::string emit_edge_list(const AdjacencyMatrix& y) {
    std::string out;
    for (std::size_t i = 0; i < y.nodes(); ++i)
        for (std::size_t j = 0; j < y.nodes(); ++j)
            if (i != j && y.edge(i, j)) out += std::to_string(i + 1) + ' ' + std::to_string(j + 1) + '\n';
    return out;
}

std::string emit_dense_csv(const AdjacencyMatrix& y) {
    std::string out;
    for (std::size_t i = 0; i < y.nodes(); ++i) {
        for (std::size_t j = 0; j < y.nodes(); ++j) {
            if (j) out += ',';
            out += (i != j && y.edge(i, j)) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(ErrorKind::Io, "read failed: " + path.string());
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) fail(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

AdjacencyMatrix load_network(const std::filesystem::path& path, std::size_t nodes) {
    const auto text = read_text_file(path);
    if (path.extension() == ".csv") return parse_dense_csv(text);
    if (nodes == 0) {
        for (auto line : split_lines(text))
            for (auto token : split_ws(line)) {
                std::size_t id = 0;
                if (parse_uint(token, id)) nodes = std::max(nodes, id);
            }
    }
    return parse_edge_list(text, nodes);
}

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("MMGOF_DATA_DIR"); env && *env) return env;
    return MMGOF_DATA_DIR;
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
        fail(ErrorKind::DataIntegrity, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

namespace {

nlohmann::json read_sampson_manifest(const std::filesystem::path& dir) {
    const auto path = dir / "sampson" / "MANIFEST.json";
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        fail(ErrorKind::DataIntegrity, std::string("Sampson manifest unavailable: ") + e.what());
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::DataIntegrity, path.string() + ": " + e.what());
    }
}

}  // namespace

AdjacencyMatrix load_sampson(const std::filesystem::path& data_dir) {
    const auto manifest = read_sampson_manifest(data_dir);
    std::string file, digest;
    std::size_t nodes = 0, edges = 0;
    try {
        file = manifest.at("file").get<std::string>();
        digest = manifest.at("sha256").get<std::string>();
        nodes = manifest.at("nodes").get<std::size_t>();
        edges = manifest.at("edges").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::DataIntegrity, std::string("Sampson manifest: ") + e.what());
    }
    const auto path = data_dir / "sampson" / file;
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        fail(ErrorKind::DataIntegrity, std::string("Sampson data unavailable: ") + e.what());
    }
    if (sha256_hex(text) != digest) fail(ErrorKind::DataIntegrity, path.string() + ": checksum mismatch");
    AdjacencyMatrix y(2);
    try {
        y = parse_edge_list(text, nodes);
    } catch (const Error& e) {
        fail(ErrorKind::DataIntegrity, path.string() + ": " + e.what());
    }
    if (y.edge_count() != edges)
        fail(ErrorKind::DataIntegrity, path.string() + ": " + std::to_string(y.edge_count()) +
                                           " edges, manifest records " + std::to_string(edges));
    return y;
}

AdjacencyMatrix load_sampson() { return load_sampson(data_directory()); }

std::vector<std::string> sampson_labels() {
    const auto manifest = read_sampson_manifest(data_directory());
    return manifest.value("labels", std::vector<std::string>{});
}

}  // namespace mmgof
