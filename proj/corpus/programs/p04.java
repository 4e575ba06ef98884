public class KthPalindrome {
    static int build(String s, int intLength) {
        int half = (intLength + 1) / 2;
        int value = Integer.parseInt(s);
        return value * 10 + half;
    }

    public static int main(String[] args) {
        String[] queries = {"12", "7", "12345"};
        int intLength = 4;
        int[] result = new int[queries.length];
        for (int i = 0; i < queries.length; i++) {
            String s = queries[i];
            result[i] =
                s.length() > (intLength + 1) / 2
                    ? -1
                    : build(s, intLength);
        }
        int answer = result[0] + result[2];
        return answer;
    }
}
