#ifndef LEXNORM_H
#define LEXNORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LexnormStatus {
  LEXNORM_STATUS_OK = 0,
  LEXNORM_STATUS_NULL_ARGUMENT = 1,
  LEXNORM_STATUS_INVALID_UTF8 = 2,
  LEXNORM_STATUS_PARSE_ERROR = 3,
  LEXNORM_STATUS_INVALID_DOCUMENT = 4,
  LEXNORM_STATUS_NOT_FOUND = 5,
  LEXNORM_STATUS_IO_ERROR = 6,
  LEXNORM_STATUS_GRAPH_ERROR = 7,
  LEXNORM_STATUS_BAD_BASE = 8,
  LEXNORM_STATUS_PANIC = 99,
} LexnormStatus;

/**
 * Opaque knowledge graph handle.
 */
typedef struct LexnormGraph LexnormGraph;

/**
 * Graph counters. Edge counts are per relation kind.
 */
typedef struct LexnormStats {
  size_t work_count;
  size_t external_node_count;
  size_t edge_count;
  size_t same_as;
  size_t about;
  size_t has_type;
  size_t jurisdiction;
  size_t passed_by;
  size_t published_by;
  size_t cites;
  size_t amends;
  size_t repeals;
  size_t related;
} LexnormStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next library call on the same thread. Do not free.
 */
const char *lexnorm_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be freed twice.
 */
void lexnorm_string_free(char *s);

/**
 * Canonical lowercase form of a LEX URN.
 *
 * # Safety
 * `urn` must be a NUL-terminated string; `out` must be writable.
 */
enum LexnormStatus lexnorm_urn_normalize(const char *urn, char **out);

/**
 * `{base}?urn={canonical urn}`.
 *
 * # Safety
 * `urn` and `base` must be NUL-terminated strings; `out` must be writable.
 */
enum LexnormStatus lexnorm_resolver_uri(const char *urn, const char *base, char **out);

/**
 * Validates a JSON-LD document. Returns `Ok` whenever the text could be
 * examined; `*report_json` holds `{"valid", "findings", ...}` and
 * `*is_valid` (if not NULL) the verdict.
 *
 * # Safety
 * `document` must be a NUL-terminated string; `report_json` must be
 * writable; `is_valid` may be NULL.
 */
enum LexnormStatus lexnorm_document_validate(const char *document,
                                             char **report_json,
                                             bool *is_valid);

/**
 * Canonical JSON-LD for a valid document. Fails with `InvalidDocument`
 * when the document has error findings.
 *
 * # Safety
 * `document` and `base` must be NUL-terminated strings; `out` must be
 * writable.
 */
enum LexnormStatus lexnorm_document_normalize(const char *document, const char *base, char **out);

/**
 * New empty graph. Never NULL.
 */
struct LexnormGraph *lexnorm_graph_new(void);

/**
 * Releases a graph. NULL is ignored.
 *
 * # Safety
 * `g` must come from this library and must not be used afterwards.
 */
void lexnorm_graph_free(struct LexnormGraph *g);

/**
 * Loads a snapshot file into a new graph.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum LexnormStatus lexnorm_graph_load(const char *path, struct LexnormGraph **out);

/**
 * Writes a snapshot file atomically.
 *
 * # Safety
 * `g` must be a live handle; `path` a NUL-terminated string.
 */
enum LexnormStatus lexnorm_graph_save(const struct LexnormGraph *g, const char *path);

/**
 * Ingests JSONL text (one document per line). `*report_json` receives the
 * ingest report and may be NULL if not wanted. Rejected records do not
 * make the call fail.
 *
 * # Safety
 * `g` must be a live handle; `jsonl` a NUL-terminated string;
 * `report_json` NULL or writable.
 */
enum LexnormStatus lexnorm_graph_ingest_jsonl(struct LexnormGraph *g,
                                              const char *jsonl,
                                              bool strict,
                                              char **report_json);

/**
 * Adds a `cites`, `amends`, `repeals` or `related` edge between stored
 * Works.
 *
 * # Safety
 * `g` must be a live handle; the strings NUL-terminated.
 */
enum LexnormStatus lexnorm_graph_add_relation(struct LexnormGraph *g,
                                              const char *from,
                                              const char *kind,
                                              const char *to);

/**
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum LexnormStatus lexnorm_graph_stats(const struct LexnormGraph *g, struct LexnormStats *out);

/**
 * Resolves a `urn` query value the way the HTTP server does. `accept` may
 * be NULL. Returns `Ok` for every HTTP outcome; `*http_status` and `*body`
 * carry the result (400/404/406 bodies are JSON problem objects).
 *
 * # Safety
 * `g` must be a live handle; `urn_param` and `base` NUL-terminated;
 * `accept` NULL or NUL-terminated; `http_status` and `body` writable.
 */
enum LexnormStatus lexnorm_graph_dereference(const struct LexnormGraph *g,
                                             const char *urn_param,
                                             const char *accept,
                                             const char *base,
                                             uint16_t *http_status,
                                             char **body);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEXNORM_H */
