var obj = {};
for (var i = 0; i < 5; i++) {
    obj[i] = i + 5;
}
