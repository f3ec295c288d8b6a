// Copyright 2026 The Genflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

#include "genflow/brand_dna.hpp"
#include "genflow/css.hpp"

namespace genflow {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kFixtureScheme = "fixture:";
constexpr int kMaxRedirects = 5;

bool looks_like_html(std::string_view body) {
    if (body.starts_with("\x89PNG") || body.starts_with("GIF8") || body.starts_with("\xFF\xD8\xFF")) return false;
    if (body.find('\0') != std::string_view::npos) return false;
    return body.find('<') != std::string_view::npos;
}

std::string read_file_limited(const fs::path& path, std::size_t max_bytes) {
    std::error_code ec;
    auto size = fs::file_size(path, ec);
    if (ec) throw Error(ErrorCode::NetworkError, fmt::format("cannot open {}", path.string()));
    if (size > max_bytes) {
        throw Error(ErrorCode::SizeExceeded, fmt::format("{} is {} bytes (limit {})", path.string(), size, max_bytes));
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NetworkError, fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool escapes_root(const fs::path& relative) {
    for (const auto& part : relative) {
        if (part == "..") return true;
    }
    return relative.is_absolute();
}

RawSite fetch_fixture(const std::string& url, const FetchPolicy& policy) {
    fs::path rel = url.substr(kFixtureScheme.size());
    if (rel.empty() || escapes_root(rel)) {
        throw Error(ErrorCode::NetworkError, fmt::format("invalid fixture path in {}", url));
    }
    auto page = policy.fixture_dir / rel;
    if (fs::is_directory(page)) page /= "index.html";
    if (!fs::exists(page)) throw Error(ErrorCode::NetworkError, fmt::format("fixture {} not found", page.string()));

    RawSite site;
    site.url = url;
    site.html = read_file_limited(page, policy.max_bytes);
    if (site.html.empty() || !looks_like_html(site.html)) {
        throw Error(ErrorCode::NotHtml, fmt::format("{} is not an HTML document", url));
    }
    std::size_t linked = 0;
    for (auto& source : css::scan_html(site.html).sources) {
        if (source.kind == css::StyleSource::Kind::inline_block) {
            site.stylesheets.push_back(std::move(source.content));
            continue;
        }
        if (linked >= policy.max_linked_sheets) continue;
        fs::path href = source.content;
        if (source.content.find("://") != std::string::npos || escapes_root(href)) continue;
        auto sheet = page.parent_path() / href;
        if (!fs::exists(sheet)) continue;
        site.stylesheets.push_back(read_file_limited(sheet, policy.max_bytes));
        ++linked;
    }
    return site;
}

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;

    [[nodiscard]] std::string origin() const { return fmt::format("{}://{}:{}", scheme, host, port); }
    [[nodiscard]] std::string str() const { return fmt::format("{}://{}:{}{}", scheme, host, port, path); }
};

std::optional<ParsedUrl> parse_url(const std::string& url) {
    static const std::regex re(R"(^(https?)://([^/:?#]+)(?::(\d+))?([^#]*)?)", std::regex::icase);
    std::smatch m;
    if (!std::regex_search(url, m, re)) return std::nullopt;
    ParsedUrl out;
    out.scheme = m[1].str();
    for (auto& c : out.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.host = m[2].str();
    out.port = m[3].matched ? std::stoi(m[3].str()) : (out.scheme == "https" ? 443 : 80);
    out.path = m[4].matched && !m[4].str().empty() ? m[4].str() : "/";
    if (out.path.front() != '/') out.path = "/" + out.path;
    return out;
}

std::string resolve(const ParsedUrl& base, const std::string& href) {
    if (href.starts_with("http://") || href.starts_with("https://")) return href;
    if (href.starts_with("//")) return base.scheme + ":" + href;
    if (href.starts_with("/")) return base.origin() + href;
    auto dir = base.path.substr(0, base.path.rfind('/') + 1);
    return base.origin() + dir + href;
}

struct HttpResponse {
    std::string body;
    std::string content_type;
    ParsedUrl final_url;
};

HttpResponse http_get(const std::string& url, const FetchPolicy& policy) {
    auto current = parse_url(url);
    if (!current) throw Error(ErrorCode::NetworkError, fmt::format("malformed url '{}'", url));
    int cross_origin_hops = 0;

    for (int hop = 0; hop <= kMaxRedirects; ++hop) {
        httplib::Client client(fmt::format("{}://{}:{}", current->scheme, current->host, current->port));
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_follow_location(false);

        std::string body;
        bool too_large = false;
        auto res = client.Get(current->path, [&](const char* data, std::size_t len) {
            if (body.size() + len > policy.max_bytes) {
                too_large = true;
                return false;
            }
            body.append(data, len);
            return true;
        });
        if (too_large) {
            throw Error(ErrorCode::SizeExceeded, fmt::format("{} exceeds {} bytes", current->str(), policy.max_bytes));
        }
        if (!res) {
            throw Error(ErrorCode::NetworkError,
                        fmt::format("{} unreachable: {}", current->str(), httplib::to_string(res.error())));
        }
        if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
            auto next = parse_url(resolve(*current, res->get_header_value("Location")));
            if (!next) throw Error(ErrorCode::NetworkError, "redirect to malformed location");
            if (next->origin() != current->origin() && ++cross_origin_hops > 1) {
                throw Error(ErrorCode::NetworkError,
                            fmt::format("{} redirected across origins more than once", url));
            }
            current = next;
            continue;
        }
        if (res->status >= 400) {
            throw Error(ErrorCode::NetworkError, fmt::format("{} returned HTTP {}", current->str(), res->status));
        }
        return {std::move(body), res->get_header_value("Content-Type"), *current};
    }
    throw Error(ErrorCode::NetworkError, fmt::format("{} exceeded {} redirects", url, kMaxRedirects));
}

RawSite fetch_http(const std::string& url, const FetchPolicy& policy) {
    auto page = http_get(url, policy);
    bool html_type = page.content_type.find("text/html") != std::string::npos ||
                     page.content_type.find("application/xhtml") != std::string::npos;
    if (!html_type || page.body.empty() || !looks_like_html(page.body)) {
        throw Error(ErrorCode::NotHtml,
                    fmt::format("{} served '{}', not HTML", url, page.content_type.empty() ? "?" : page.content_type));
    }
    RawSite site;
    site.url = url;
    site.html = std::move(page.body);
    std::size_t linked = 0;
    for (auto& source : css::scan_html(site.html).sources) {
        if (source.kind == css::StyleSource::Kind::inline_block) {
            site.stylesheets.push_back(std::move(source.content));
            continue;
        }
        if (linked >= policy.max_linked_sheets) continue;
        try {
            auto sheet = http_get(resolve(page.final_url, source.content), policy);
            site.stylesheets.push_back(std::move(sheet.body));
            ++linked;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SizeExceeded) throw;
            // Unreachable stylesheets are skipped, as a browser would.
        }
    }
    return site;
}

}  // namespace

RawSite fetch_site(const std::string& url, const FetchPolicy& policy) {
    if (url.starts_with(kFixtureScheme)) return fetch_fixture(url, policy);
    if (url.starts_with("http://") || url.starts_with("https://")) return fetch_http(url, policy);
    throw Error(ErrorCode::NetworkError, fmt::format("unsupported url '{}'", url));
}

}  // namespace genflow
