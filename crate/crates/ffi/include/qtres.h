#ifndef QTRES_H
#define QTRES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum QtresStatus {
  QTRES_STATUS_OK = 0,
  QTRES_STATUS_NULL_ARGUMENT = 1,
  QTRES_STATUS_INVALID_UTF8 = 2,
  QTRES_STATUS_IO = 3,
  QTRES_STATUS_MALFORMED_INPUT = 4,
  QTRES_STATUS_INVALID_CONFIG = 5,
  QTRES_STATUS_UNKNOWN_REFERENCE = 6,
  QTRES_STATUS_OUT_OF_RANGE = 7,
  QTRES_STATUS_INTERNAL = 8,
} QtresStatus;

/*
 The answer to one query: clusters of reference ids.
 */
typedef struct QtresAnswer QtresAnswer;

/*
 A loaded reference dataset.
 */
typedef struct QtresDataset QtresDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. Valid until the
 next call on the same thread.
 */
const char *qtres_last_error(void);

/*
 Loads a record file or snapshot from `path`.

 # Safety
 `path` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum QtresStatus qtres_dataset_load(const char *path, struct QtresDataset **out);

/*
 Parses newline-delimited records held in memory.

 # Safety
 `records` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum QtresStatus qtres_dataset_parse(const char *records, struct QtresDataset **out);

/*
 Number of references in the dataset; 0 for a null handle.

 # Safety
 `ds` must be null or a handle from this library.
 */
size_t qtres_dataset_len(const struct QtresDataset *ds);

/*
 # Safety
 `ds` must be null or a handle from this library not yet freed.
 */
void qtres_dataset_free(struct QtresDataset *ds);

/*
 Resolves the references named `name`.

 `config_toml` may be null for the built-in defaults. A negative `depth`
 keeps the configured depth; a NaN `threshold` keeps the configured merge
 threshold. An unanswerable query succeeds with an empty answer.

 # Safety
 `ds` must be a live dataset handle, strings nul-terminated, `out` valid.
 */
enum QtresStatus qtres_query(const struct QtresDataset *ds,
                             const char *config_toml,
                             const char *name,
                             int depth,
                             double threshold,
                             struct QtresAnswer **out);

/*
 1 if the query matched at least one reference, else 0.

 # Safety
 `ans` must be null or a live answer handle.
 */
int qtres_answer_is_answerable(const struct QtresAnswer *ans);

/*
 Size of the relevant set the answer was computed from.

 # Safety
 `ans` must be null or a live answer handle.
 */
size_t qtres_answer_relevant_size(const struct QtresAnswer *ans);

/*
 # Safety
 `ans` must be null or a live answer handle.
 */
size_t qtres_answer_cluster_count(const struct QtresAnswer *ans);

/*
 Number of references in cluster `i`; 0 when out of range.

 # Safety
 `ans` must be null or a live answer handle.
 */
size_t qtres_answer_cluster_len(const struct QtresAnswer *ans, size_t i);

/*
 Id of reference `j` of cluster `i`, or null when out of range. The string
 lives as long as the answer.

 # Safety
 `ans` must be null or a live answer handle.
 */
const char *qtres_answer_ref_id(const struct QtresAnswer *ans, size_t i, size_t j);

/*
 # Safety
 `ans` must be null or an answer handle not yet freed.
 */
void qtres_answer_free(struct QtresAnswer *ans);

/*
 Predicted recall after `n` expansion rounds under uniform attribute
 identification probability `a` and relational probability `r`.

 # Safety
 `out` must be a valid pointer.
 */
enum QtresStatus qtres_closed_form_recall(double a, double r, uint32_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTRES_H */
