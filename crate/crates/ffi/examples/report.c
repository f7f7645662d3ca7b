#include <stdio.h>
#include <stdlib.h>

#include "jumpgen.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    rewind(f);
    char *buf = malloc(n + 1);
    if (fread(buf, 1, n, f) != (size_t)n) { free(buf); fclose(f); return NULL; }
    buf[n] = 0;
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s CONFIG.json\n", argv[0]);
        return 2;
    }
    char *src = slurp(argv[1]);
    if (!src) { perror(argv[1]); return 2; }
    JgSession *s = NULL;
    JgStatus st = jg_session_new(src, &s);
    free(src);
    if (st != JG_STATUS_OK) {
        fprintf(stderr, "%s\n", jg_last_error());
        return st;
    }
    char *json = NULL;
    st = jg_session_report_json(s, &json);
    if (st == JG_STATUS_OK) {
        fputs(json, stdout);
        jg_string_free(json);
    }
    jg_session_free(s);
    return st;
}
