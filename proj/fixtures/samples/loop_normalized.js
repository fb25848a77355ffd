var v0 = {};
for (var v1 = 0; v1 < 5; v1++) {
    v0[v1] = v1 + 5;
}
